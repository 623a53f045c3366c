"""Review service: persistence, job queue, and the /api/v1 HTTP layer."""

from .app import ReviewService, create_app
from .config import ServiceConfig
from .jobs import JobQueue
from .modify import MODIFIER_KINDS, ModifierPlan, execute_plan, plan_modifier
from .store import (
    INDEX_ABSENT,
    INDEX_BUILDING,
    INDEX_READY,
    JOB_DONE,
    JOB_FAILED,
    JOB_QUEUED,
    JOB_RUNNING,
    Comment,
    JobRecord,
    Project,
    Store,
)

__all__ = [
    "Comment",
    "INDEX_ABSENT",
    "INDEX_BUILDING",
    "INDEX_READY",
    "JOB_DONE",
    "JOB_FAILED",
    "JOB_QUEUED",
    "JOB_RUNNING",
    "JobQueue",
    "JobRecord",
    "MODIFIER_KINDS",
    "ModifierPlan",
    "Project",
    "ReviewService",
    "ServiceConfig",
    "Store",
    "create_app",
    "execute_plan",
    "plan_modifier",
]
