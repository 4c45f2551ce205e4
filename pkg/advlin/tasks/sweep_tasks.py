"""Top-level task functions for sweep points; each runs one independent computation."""
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from advlin.schemas.dynamics import GridRow, RecurrenceParams
from advlin.schemas.gaussian import GaussianModel
from advlin.schemas.training import RunStats, TrainConfig
from advlin.services import dynamics
from advlin.services.trainer import export_run_stats_csv, trainer

logger = logging.getLogger(__name__)


def streaming_point(payload: Tuple[GaussianModel, TrainConfig, Optional[Path]]) -> Dict[str, Any]:
    """
    One streaming run of the sign-count sweep, writing its trace when a path is given.

    Returns:
        Dict with epsilon, seed, pos_count, neg_count, zero_count and final_test_accuracy
    """
    model, cfg, trace_path = payload
    logger.info("Sign-count point started", extra={"epsilon": cfg.epsilon, "loss": cfg.loss.token, "seed": cfg.seed})
    try:
        stats = trainer.train_streaming(model, cfg)
        if trace_path is not None:
            export_run_stats_csv(stats, trace_path)
    except Exception as e:
        logger.error(f"Sign-count point failed at epsilon={cfg.epsilon}: {str(e)}", exc_info=True)
        raise
    census = stats.per_step_sign_counts[0]
    return {
        "epsilon": cfg.epsilon,
        "seed": cfg.seed,
        "pos_count": census.positive,
        "neg_count": census.negative,
        "zero_count": census.zero,
        "final_test_accuracy": stats.final_test_accuracy,
        "final_theta": stats.final_theta[0],
    }


def epoch_point(payload: Tuple[GaussianModel, TrainConfig]) -> RunStats:
    """One epoch run of the 100-d sweep."""
    model, cfg = payload
    logger.info("Epoch point started", extra={"epsilon": cfg.epsilon, "loss": cfg.loss.token, "seed": cfg.seed})
    try:
        return trainer.train_epochs(model, cfg)
    except Exception as e:
        logger.error(f"Epoch point failed at epsilon={cfg.epsilon}: {str(e)}", exc_info=True)
        raise


def dynamics_triple(payload: Tuple[RecurrenceParams, Any, int]) -> GridRow:
    """Proposition checks for one (eta, mu, epsilon) triple."""
    params, theta0, horizon = payload
    row = dynamics.check_triple(params, theta0, horizon)
    if row.failed:
        logger.warning(f"Proposition check failed for {params.label()}")
    return row
