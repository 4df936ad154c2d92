import json
import logging
from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from apps.common.exceptions import ConfigParseError, EmptyChannel, NumericFailure, ScenarioError
from apps.outage.config import parse_config
from apps.outage.runner import emit_csv, run, store_run
from apps.outage.scenario import SWEEP_PARAMETERS
from apps.outage.tasks import resolve_executor
from apps.topology.pointprocess import sample_bpp, sample_mhccp, write_realization

logger = logging.getLogger(__name__)

VALIDATION_EXIT = 1
NUMERIC_EXIT = 2


def format_validation_error(error: ValidationError) -> str:
    detail = error.detail
    if isinstance(detail, dict):
        return '; '.join(
            f"{key}: {' '.join(str(message) for message in messages)}"
            for key, messages in detail.items()
        )
    return ' '.join(str(message) for message in detail)


class Command(BaseCommand):
    help = 'Outage probability of the aerial-to-satellite uplink: run, sweep, validate or dump'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        run_parser = subparsers.add_parser('run', help='Evaluate one scenario')
        sweep_parser = subparsers.add_parser('sweep', help='Evaluate a scenario along one parameter')
        for sub in (run_parser, sweep_parser):
            sub.add_argument('config', help='Path to a key = value configuration file')
            sub.add_argument('--mode', choices=['analytic', 'montecarlo', 'both'])
            sub.add_argument('--seed', help='Monte Carlo seed, overrides the config')
            sub.add_argument('--out', help='CSV destination; metadata goes to <out>.meta.json')
            sub.add_argument('--no-timing', action='store_true', help='Leave runtime_ms empty')
        sweep_parser.add_argument('--param', required=True, choices=SWEEP_PARAMETERS)
        sweep_parser.add_argument('--values', required=True, help='Comma separated values in config units')

        validate_parser = subparsers.add_parser('validate', help='Check a configuration only')
        validate_parser.add_argument('config')

        dump_parser = subparsers.add_parser('dump', help='Write one sampled topology as CSV')
        dump_parser.add_argument('config')
        dump_parser.add_argument('--seed', help='Sampling seed, overrides the config')
        dump_parser.add_argument('--out', help='CSV destination (stdout when omitted)')

    def handle(self, *args, **options):
        subcommand = options['subcommand']
        try:
            config = self.load_config(options)
            if subcommand == 'validate':
                self.stdout.write(self.style.SUCCESS(f"Configuration {options['config']} is valid"))
            elif subcommand == 'dump':
                self.dump(config, options.get('out'))
            else:
                self.execute_run(config, options)
        except (ConfigParseError, ScenarioError, EmptyChannel) as exc:
            raise CommandError(f"Invalid configuration: {exc}", returncode=VALIDATION_EXIT)
        except ValidationError as exc:
            raise CommandError(
                f"Invalid configuration: {format_validation_error(exc)}", returncode=VALIDATION_EXIT,
            )
        except NumericFailure as exc:
            logger.error("Numeric failure: %s", exc)
            raise CommandError(f"Numeric failure: {exc}", returncode=NUMERIC_EXIT)

    def load_config(self, options):
        path = Path(options['config'])
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as exc:
            raise CommandError(f"Cannot read {path}: {exc}", returncode=VALIDATION_EXIT)

        overrides = {
            'mode': options.get('mode'),
            'seed': options.get('seed'),
        }
        if options['subcommand'] == 'sweep':
            overrides['sweep_param'] = options['param']
            overrides['sweep_values'] = options['values']
        return parse_config(text, overrides)

    def execute_run(self, config, options):
        rows = run(config, executor=resolve_executor(), timing=not options['no_timing'])
        record = store_run(config, rows)
        metadata = config.metadata()
        logger.info("Run %s stored; assumed defaults: %s", record.id, metadata['assumed_defaults'])

        out = options.get('out')
        if out:
            with open(out, 'w', encoding='utf-8', newline='') as stream:
                emit_csv(rows, stream)
            with open(f"{out}.meta.json", 'w', encoding='utf-8') as stream:
                json.dump(metadata, stream, indent=2, sort_keys=True)
            self.stderr.write(f"Wrote {len(rows)} row(s) to {out}")
        else:
            emit_csv(rows, self.stdout)

    def dump(self, config, out):
        rng = np.random.default_rng(config.seed)
        scn = config.scenario
        bpp = sample_bpp(rng, scn.n1_total, scn.region)
        mhccp = sample_mhccp(rng, scn.topology)
        if out:
            with open(out, 'w', encoding='utf-8', newline='') as stream:
                count = write_realization(stream, bpp, mhccp)
            self.stderr.write(f"Wrote {count} node(s) to {out}")
        else:
            write_realization(self.stdout, bpp, mhccp)
