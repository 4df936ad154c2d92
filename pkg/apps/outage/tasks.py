import logging

import numpy as np
from celery import group, shared_task
from django.conf import settings

from .montecarlo import simulate_range
from .scenario import Scenario, SnapshotOptions

logger = logging.getLogger(__name__)


@shared_task
def simulate_chunk(scenario, options, seed, start, stop, quantity='sinr'):
    """Simulate replications start .. stop - 1 and return their samples"""
    samples = simulate_range(
        Scenario.from_dict(scenario),
        SnapshotOptions.from_dict(options),
        seed,
        start,
        stop,
        quantity,
    )
    return {'start': start, 'stop': stop, 'samples': samples.tolist()}


def celery_executor(scn, opts, seed, chunks, quantity):
    """Fan the chunks out as a Celery group; results come back in chunk order"""
    signatures = group(
        simulate_chunk.s(scn.to_dict(), opts.to_dict(), seed, start, stop, quantity)
        for start, stop in chunks
    )
    results = signatures.apply_async().get(disable_sync_subtasks=False)
    logger.info("Collected %d Monte Carlo chunks from workers", len(results))
    return [np.asarray(result['samples'], dtype=float) for result in results]


def resolve_executor():
    """Executor selected by OUTAGE_MC_BACKEND; None runs replications in-process"""
    if settings.OUTAGE_MC_BACKEND == 'celery':
        return celery_executor
    return None
