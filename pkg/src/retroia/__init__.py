"""Degrees-of-freedom regions and retrospective interference alignment for
the two-user MIMO interference channel with feedback."""

from .model import (AntennaConfig, ChannelRealization, DegenerateChannel, FeedbackSetting,
                    ReducedRealization, generate_channels, reduce_interference_columns)
from .regions import (CaseClass, DofPoint, DofRegion, HalfPlane, Known, UnknownByThisPaper,
                      classify_case, condition_holds, corner_points, icsit_op_region,
                      region_for_setting, shannon_outer_region)
from .scenarios import run_example_6243_dcsit, run_example_6243_shannon
from .scheme import (SchemeParams, TransmitSchedule, build_schedule, build_set_plan, plan,
                     plan_case_a, plan_case_b_13, plan_case_b_o21, validate)
from .simulator import (NOISELESS, DecodeReport, IllConditioned, Noisy, ScheduleMismatch,
                        SimulationMode, decode_success_rate, noise_robustness, run_scheme,
                        simulate)

__all__ = [
    "AntennaConfig", "ChannelRealization", "DegenerateChannel", "FeedbackSetting",
    "ReducedRealization", "generate_channels", "reduce_interference_columns",
    "CaseClass", "DofPoint", "DofRegion", "HalfPlane", "Known", "UnknownByThisPaper",
    "classify_case", "condition_holds", "corner_points", "icsit_op_region",
    "region_for_setting", "shannon_outer_region",
    "run_example_6243_dcsit", "run_example_6243_shannon",
    "SchemeParams", "TransmitSchedule", "build_schedule", "build_set_plan", "plan",
    "plan_case_a", "plan_case_b_13", "plan_case_b_o21", "validate",
    "NOISELESS", "DecodeReport", "IllConditioned", "Noisy", "ScheduleMismatch",
    "SimulationMode", "decode_success_rate", "noise_robustness", "run_scheme", "simulate",
]
