import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import List

from qpsoc.app.config import SettingsModel, load_settings
from qpsoc.app.core.errors import QPSocError
from qpsoc.app.services.reports import RunReport
from qpsoc.app.workflow.pipeline import run_compare

logger = logging.getLogger(__name__)


def compare_batch(paths: List[str], settings: SettingsModel = None, **options) -> List[RunReport]:
    """
    Run compare over several instances in a thread pool.
    Reports come back in input order; a failing instance yields a report with `error` set.
    """
    settings = settings or load_settings()
    results: List[RunReport] = [None] * len(paths)
    total = len(paths)
    completed = 0

    logger.info("compare batch started: %d instances", total)
    with ThreadPoolExecutor(max_workers=max(1, settings.max_workers)) as executor:
        future_to_index = {
            executor.submit(run_compare, path, settings=settings, **options): k
            for k, path in enumerate(paths)
        }
        for future in as_completed(future_to_index):
            k = future_to_index[future]
            completed += 1
            try:
                results[k] = future.result()
                logger.info("[DONE] %s (%d/%d)", paths[k], completed, total)
            except (QPSocError, OSError) as e:
                logger.error("[FAILED] %s: %s", paths[k], e)
                results[k] = RunReport(command="compare", instance=paths[k], error=str(e))

    return results
