"""Ray for running sweep branches in parallel: https://github.com/ray-project/ray"""
from typing import Optional

from nlskp.common.logger import init_logger

logger = init_logger(__name__)

try:
    import ray

    class RayBranchWorker:
        """Ray wrapper for a branch runner, which is built lazily inside the
        actor so that torch thread settings apply to the worker process."""

        def __init__(self) -> None:
            self.runner = None

        def init_runner(self, runner_init_fn):
            self.runner = runner_init_fn()

        def __getattr__(self, name):
            return getattr(self.runner, name)

        def execute_method(self, method, *args, **kwargs):
            executor = getattr(self, method)
            return executor(*args, **kwargs)

except ImportError as e:
    logger.warning(f"Failed to import Ray with {e!r}. "
                   "For parallel sweeps, please install Ray with "
                   "`pip install nlskp[ray]`.")
    ray = None
    RayBranchWorker = None  # pylint: disable=invalid-name


def initialize_cluster(worker_use_ray: bool = False,
                       ray_address: Optional[str] = None) -> None:
    """Connect to a Ray cluster when branches run as Ray actors.

    Args:
        worker_use_ray: Whether sweep branches run on Ray.
        ray_address: The address of the Ray cluster. If None, a local
            cluster is started.
    """
    if not worker_use_ray:
        return
    if ray is None:
        raise ImportError(
            "Ray is not installed. Please install Ray to run sweep branches "
            "in parallel.")
    ray.init(address=ray_address, ignore_reinit_error=True)
