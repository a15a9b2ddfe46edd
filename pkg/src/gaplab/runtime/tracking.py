"""Binary UDP pose-broadcast protocol (TRK1) and the loopback demo bridge.

Datagram layout, little-endian, 68 bytes total:
    magic   4 bytes  b"TRK1"
    id      u32      object id
    t       f32      timestamp, seconds
    x y z   3 x f64  position, meters
    q       4 x f64  orientation quaternion (x, y, z, w), unit norm

Planar poses encode yaw as (0, 0, sin(yaw/2), cos(yaw/2)). Pose fields
carry full double precision; the timestamp rides as f32 to fit the
fixed 68-byte frame.
"""

import math
import socket
import struct
import threading
import time

from gaplab.geometry import Pose

MAGIC = b"TRK1"
DATAGRAM_SIZE = 68
_STRUCT = struct.Struct("<4sIf3d4d")
_QUAT_NORM_TOL = 1e-9


class ProtocolError(ValueError):
    pass


def encode_tracking(pose, object_id):
    for v in (pose.x, pose.y, pose.z, pose.yaw, pose.timestamp):
        if not math.isfinite(v):
            raise ValueError("pose fields must be finite")
    qz = math.sin(pose.yaw / 2.0)
    qw = math.cos(pose.yaw / 2.0)
    data = _STRUCT.pack(MAGIC, object_id, pose.timestamp,
                        pose.x, pose.y, pose.z, 0.0, 0.0, qz, qw)
    assert len(data) == DATAGRAM_SIZE
    return data


def decode_tracking(data):
    if len(data) != DATAGRAM_SIZE:
        raise ProtocolError(f"expected {DATAGRAM_SIZE} bytes, got {len(data)}")
    magic, object_id, t, x, y, z, qx, qy, qz, qw = _STRUCT.unpack(data)
    if magic != MAGIC:
        raise ProtocolError(f"bad magic {magic!r}")
    norm = math.sqrt(qx * qx + qy * qy + qz * qz + qw * qw)
    if abs(norm - 1.0) > _QUAT_NORM_TOL:
        raise ProtocolError(f"quaternion norm {norm} out of tolerance")
    yaw = math.atan2(2.0 * (qw * qz + qx * qy), 1.0 - 2.0 * (qy * qy + qz * qz))
    return object_id, Pose(x=x, y=y, z=z, yaw=yaw, timestamp=t)


class TrackingReceiver:
    """Bound UDP endpoint that decodes datagrams and counts malformed ones."""

    def __init__(self, bind_addr=("127.0.0.1", 0)):
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self.sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            self.sock.bind(bind_addr)
        except OSError as exc:
            self.sock.close()
            raise RuntimeError(f"cannot bind tracking receiver on {bind_addr}: {exc}")
        self.sock.settimeout(0.05)
        self.dropped = 0

    @property
    def address(self):
        return self.sock.getsockname()

    def poll(self, deadline=None):
        """Decoded (id, Pose) tuples received until the deadline passes."""
        out = []
        end = time.monotonic() + (deadline if deadline is not None else 0.05)
        while time.monotonic() < end:
            try:
                data, _ = self.sock.recvfrom(2048)
            except socket.timeout:
                continue
            try:
                out.append(decode_tracking(data))
            except ProtocolError:
                self.dropped += 1
        return out

    def close(self):
        self.sock.close()


class TrackingBroadcaster:
    def __init__(self, target_addr):
        self.target = target_addr
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)

    def send(self, pose, object_id):
        self.sock.sendto(encode_tracking(pose, object_id), self.target)

    def send_raw(self, data):
        self.sock.sendto(data, self.target)

    def close(self):
        self.sock.close()


def udp_demo_bridge(poses, rate=100.0, host="127.0.0.1"):
    """Loopback soak: broadcast the poses at the given rate, decode them back.

    Returns (decoded list, dropped count). Pure message passing: sender
    runs on a side thread, the receiver collects until the stream ends.
    """
    receiver = TrackingReceiver((host, 0))
    sender = TrackingBroadcaster(receiver.address)
    period = 1.0 / rate
    done = threading.Event()

    def pump():
        next_t = time.monotonic()
        for k, pose in enumerate(poses):
            sender.send(pose, k)
            next_t += period
            delay = next_t - time.monotonic()
            if delay > 0:
                time.sleep(delay)
        done.set()

    thread = threading.Thread(target=pump, daemon=True)
    thread.start()
    decoded = []
    while not done.is_set():
        decoded.extend(receiver.poll(0.05))
    decoded.extend(receiver.poll(0.2))
    thread.join()
    dropped = receiver.dropped
    sender.close()
    receiver.close()
    return decoded, dropped
