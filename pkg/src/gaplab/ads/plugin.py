"""External policy plug-in protocol.

The plug-in is a long-running subprocess. Per control tick the driver
writes the current camera frame to a file and sends one request line

    <image_path> <x> <y> <yaw> <speed>

on stdin; the plug-in answers with one line "throttle steering brake".
Responses must arrive within the deadline (45 ms by default, inside the
~50 ms control budget); late or malformed replies repeat the previous
command and are logged as plugin-timeout events.
"""

import os
import select
import subprocess
import tempfile

from gaplab.plant import ControlCommand
from gaplab.sensing.io import write_ppm

DEFAULT_TIMEOUT = 0.045


class PolicyPlugin:
    needs_rgb = True
    needs_depth = False

    def __init__(self, command, timeout=DEFAULT_TIMEOUT, workdir=None):
        self.timeout = timeout
        self.workdir = workdir or tempfile.mkdtemp(prefix="gaplab_plugin_")
        self.proc = subprocess.Popen(
            command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, bufsize=1)
        self.last_command = ControlCommand(throttle=0.0, steering=0.0)
        self.events = []
        self.finished = False
        self._frame_counter = 0

    def close(self):
        if self.proc.poll() is None:
            self.proc.terminate()
            try:
                self.proc.wait(timeout=1.0)
            except subprocess.TimeoutExpired:
                self.proc.kill()

    def _read_line(self):
        ready, _, _ = select.select([self.proc.stdout], [], [], self.timeout)
        if not ready:
            return None
        return self.proc.stdout.readline()

    def control(self, inputs):
        path = os.path.join(self.workdir, f"frame_{self._frame_counter:06d}.ppm")
        self._frame_counter += 1
        write_ppm(inputs.rgb, path)
        pose = inputs.pose
        try:
            self.proc.stdin.write(f"{path} {pose.x!r} {pose.y!r} {pose.yaw!r} {inputs.speed!r}\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, ValueError):
            self.events.append("plugin_dead")
            return self.last_command
        line = self._read_line()
        if not line:
            self.events.append("plugin_timeout")
            return self.last_command
        try:
            throttle, steering, brake = (float(v) for v in line.split())
            cmd = ControlCommand(throttle=throttle, steering=steering, brake=brake)
        except (ValueError, TypeError):
            self.events.append("plugin_bad_response")
            return self.last_command
        self.last_command = cmd
        return cmd
