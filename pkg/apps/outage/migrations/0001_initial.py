# Generated by Django 5.0.1 on 2026-10-19 10:12

import django.db.models.deletion
import uuid
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='OutageRun',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('mode', models.CharField(choices=[('analytic', 'Analytic'), ('montecarlo', 'Monte Carlo'), ('both', 'Analytic and Monte Carlo')], max_length=20, verbose_name='mode')),
                ('sweep_param', models.CharField(blank=True, max_length=20, verbose_name='sweep parameter')),
                ('seed', models.BigIntegerField(verbose_name='seed')),
                ('n_iter', models.PositiveIntegerField(verbose_name='Monte Carlo iterations')),
                ('config', models.JSONField(default=dict, verbose_name='configuration')),
                ('metadata', models.JSONField(default=dict, verbose_name='metadata')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='created at')),
                ('finished_at', models.DateTimeField(blank=True, null=True, verbose_name='finished at')),
            ],
            options={
                'verbose_name': 'outage run',
                'verbose_name_plural': 'outage runs',
                'db_table': 'outage_runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='OutageResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('position', models.PositiveIntegerField(verbose_name='position')),
                ('sweep_value', models.FloatField(blank=True, null=True, verbose_name='sweep value')),
                ('p_out_analytic', models.FloatField(blank=True, null=True, verbose_name='analytic outage probability')),
                ('p_out_mc', models.FloatField(blank=True, null=True, verbose_name='Monte Carlo outage probability')),
                ('mc_ci95', models.FloatField(blank=True, null=True, verbose_name='Monte Carlo 95% half-width')),
                ('runtime_ms', models.FloatField(blank=True, null=True, verbose_name='runtime (ms)')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='outage.outagerun')),
            ],
            options={
                'verbose_name': 'outage result',
                'verbose_name_plural': 'outage results',
                'db_table': 'outage_results',
                'ordering': ['run', 'position'],
                'unique_together': {('run', 'position')},
            },
        ),
    ]
