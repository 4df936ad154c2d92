import csv
import logging
import time
from dataclasses import dataclass
from typing import Iterable, List, Optional

from django.db import transaction
from django.utils import timezone

from .analysis import a2_share_for, outage_probability
from .config import RunConfig
from .models import OutageResult, OutageRun
from .montecarlo import estimate_outage, estimate_outage_curve
from .scenario import with_parameter

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['sweep_param', 'sweep_value', 'p_out_analytic', 'p_out_mc', 'mc_ci95', 'runtime_ms']


@dataclass
class ResultRow:
    sweep_param: str = ''
    sweep_value: Optional[float] = None
    p_out_analytic: Optional[float] = None
    p_out_mc: Optional[float] = None
    mc_ci95: Optional[float] = None
    runtime_ms: Optional[float] = None


def _elapsed_ms(started: float) -> float:
    return (time.perf_counter() - started) * 1000.0


def run(config: RunConfig, executor=None, timing: bool = True) -> List[ResultRow]:
    """
    Execute the configured mode(s); one row per sweep value, or one row.

    A threshold sweep reuses a single batch of Monte Carlo samples for every
    row; its wall time is split evenly across the rows.
    """
    param = config.sweep_param
    points = config.sweep_points() if param else [(None, None)]
    logger.info(
        "Starting %s run: %s, %d point(s), seed=%d",
        config.mode, param or 'single scenario', len(points), config.seed,
    )

    shared_mc, shared_ms = None, 0.0
    if config.runs_montecarlo and param == 'T':
        started = time.perf_counter()
        shared_mc = estimate_outage_curve(
            config.scenario, [si for _, si in points], config.n_iter, config.seed,
            config.snapshot, executor,
        )
        shared_ms = _elapsed_ms(started) / len(points)

    rows = []
    for index, (value, si_value) in enumerate(points):
        started = time.perf_counter()
        scn, threshold = config.scenario, config.threshold
        if param == 'T':
            threshold = si_value
        elif param:
            scn = with_parameter(scn, param, si_value)

        row = ResultRow(sweep_param=param or '', sweep_value=value)
        if config.runs_analytic:
            share = a2_share_for(scn, config.snapshot.a2_channel_policy)
            row.p_out_analytic = outage_probability(scn, threshold, config.series, share)
        if shared_mc is not None:
            estimate = shared_mc[index]
        elif config.runs_montecarlo:
            estimate = estimate_outage(scn, threshold, config.n_iter, config.seed, config.snapshot, executor)
        else:
            estimate = None
        if estimate is not None:
            row.p_out_mc, row.mc_ci95 = estimate.p_hat, estimate.half_width_95
        if timing:
            row.runtime_ms = _elapsed_ms(started) + shared_ms
        rows.append(row)

    logger.info("Finished %s run with %d row(s)", config.mode, len(rows))
    return rows


def _cell(value) -> str:
    return '' if value is None else repr(float(value))


def emit_csv(rows: Iterable[ResultRow], destination) -> None:
    """Write the result table to an open text stream"""
    writer = csv.writer(destination, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            row.sweep_param,
            _cell(row.sweep_value),
            _cell(row.p_out_analytic),
            _cell(row.p_out_mc),
            _cell(row.mc_ci95),
            _cell(row.runtime_ms),
        ])


@transaction.atomic
def store_run(config: RunConfig, rows: List[ResultRow]) -> OutageRun:
    """Persist a finished run and its rows"""
    run_record = OutageRun.objects.create(
        mode=config.mode,
        sweep_param=config.sweep_param or '',
        seed=config.seed,
        n_iter=config.n_iter,
        config=config.values,
        metadata=config.metadata(),
        finished_at=timezone.now(),
    )
    OutageResult.objects.bulk_create([
        OutageResult(
            run=run_record,
            position=position,
            sweep_value=row.sweep_value,
            p_out_analytic=row.p_out_analytic,
            p_out_mc=row.p_out_mc,
            mc_ci95=row.mc_ci95,
            runtime_ms=row.runtime_ms,
        )
        for position, row in enumerate(rows)
    ])
    return run_record
