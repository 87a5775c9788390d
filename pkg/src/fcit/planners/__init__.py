from .fcit import FCITStar, fcit_plan, fcit_plan_rdisc
from .problem import PlannerSettings, PlanningAborted, PlanResult, ProblemDef, check_path, path_length
from .rrt import rrt_connect, rrt_star
from .shortcut import shortcut

PLANNERS = {
    "fcit": fcit_plan,
    "fcit-rdisc": fcit_plan_rdisc,
    "rrtc": rrt_connect,
    "rrtstar": rrt_star,
}

__all__ = [
    "FCITStar",
    "PLANNERS",
    "PlanResult",
    "PlannerSettings",
    "PlanningAborted",
    "ProblemDef",
    "check_path",
    "fcit_plan",
    "fcit_plan_rdisc",
    "path_length",
    "rrt_connect",
    "rrt_star",
    "shortcut",
]
