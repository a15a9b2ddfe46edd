from gaplab.runtime.drivers import (
    BrakeAtDriver,
    PhaseSpeedDriver,
    ScriptedDriver,
    WaypointDriver,
    constant_command,
)
from gaplab.runtime.loop import ControlInputs, build_header, run_closed_loop, scenario_hash
from gaplab.runtime.rates import RateConfig
from gaplab.runtime.runlog import (
    COMPLETED,
    CRASH,
    FrameDigest,
    OUT_OF_ROAD,
    Outcome,
    PLANNER_BLOCKED,
    RunLog,
    TIMEOUT,
    TickRecord,
    load_runlog,
    save_runlog,
)
from gaplab.runtime.tracking import (
    DATAGRAM_SIZE,
    ProtocolError,
    TrackingBroadcaster,
    TrackingReceiver,
    decode_tracking,
    encode_tracking,
    udp_demo_bridge,
)

__all__ = [
    "BrakeAtDriver", "PhaseSpeedDriver", "ScriptedDriver", "WaypointDriver",
    "constant_command", "ControlInputs", "build_header", "run_closed_loop",
    "scenario_hash", "RateConfig", "COMPLETED", "CRASH", "FrameDigest",
    "OUT_OF_ROAD", "Outcome", "PLANNER_BLOCKED", "RunLog", "TIMEOUT",
    "TickRecord", "load_runlog", "save_runlog", "DATAGRAM_SIZE",
    "ProtocolError", "TrackingBroadcaster", "TrackingReceiver",
    "decode_tracking", "encode_tracking", "udp_demo_bridge",
]
