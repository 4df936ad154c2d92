import uuid

from django.db import models
from django.utils.translation import gettext_lazy as _


class OutageRun(models.Model):
    """One execution of the toolkit: a single scenario or a sweep"""

    MODE_CHOICES = [
        ('analytic', _('Analytic')),
        ('montecarlo', _('Monte Carlo')),
        ('both', _('Analytic and Monte Carlo')),
    ]

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    mode = models.CharField(_('mode'), max_length=20, choices=MODE_CHOICES)
    sweep_param = models.CharField(_('sweep parameter'), max_length=20, blank=True)

    seed = models.BigIntegerField(_('seed'))
    n_iter = models.PositiveIntegerField(_('Monte Carlo iterations'))

    # normalized configuration in the units of the config file
    config = models.JSONField(_('configuration'), default=dict)
    metadata = models.JSONField(_('metadata'), default=dict)

    created_at = models.DateTimeField(_('created at'), auto_now_add=True)
    finished_at = models.DateTimeField(_('finished at'), null=True, blank=True)

    class Meta:
        db_table = 'outage_runs'
        ordering = ['-created_at']
        verbose_name = _('outage run')
        verbose_name_plural = _('outage runs')

    def __str__(self):
        label = self.sweep_param or 'single'
        return f"{self.mode} run ({label}) - {self.id}"


class OutageResult(models.Model):
    """One row of a run's result table"""

    run = models.ForeignKey(OutageRun, on_delete=models.CASCADE, related_name='results')
    position = models.PositiveIntegerField(_('position'))

    sweep_value = models.FloatField(_('sweep value'), null=True, blank=True)
    p_out_analytic = models.FloatField(_('analytic outage probability'), null=True, blank=True)
    p_out_mc = models.FloatField(_('Monte Carlo outage probability'), null=True, blank=True)
    mc_ci95 = models.FloatField(_('Monte Carlo 95% half-width'), null=True, blank=True)
    runtime_ms = models.FloatField(_('runtime (ms)'), null=True, blank=True)

    class Meta:
        db_table = 'outage_results'
        ordering = ['run', 'position']
        unique_together = [['run', 'position']]
        verbose_name = _('outage result')
        verbose_name_plural = _('outage results')

    def __str__(self):
        return f"{self.run_id} #{self.position}"
