"""External classifier adapters speaking line-delimited JSON.

Both adapters implement the detect/categorize contract and fall back to a
local classifier (the rule engine by default) whenever the remote side
times out, dies, or answers with something malformed. The wire format is
described in ``docs/classifier_adapter.md``.
"""

from __future__ import annotations

import json
import logging
import queue
import shlex
import subprocess
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass, field

from .platform import PostRecord
from .rules import RuleClassifier
from .taxonomy import AssignedLabel, PostVerdict, TaxonomyLabel

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0
PROTOCOL_VERSION = 1


class AdapterError(Exception):
    pass


def request(op: str, post: PostRecord) -> dict:
    return {"v": PROTOCOL_VERSION, "op": op, "post": post.to_dict()}


def parse_detect(resp: dict) -> bool:
    if not isinstance(resp.get("is_piracy"), bool):
        raise AdapterError(f"detect reply lacks boolean is_piracy: {resp!r}")
    return resp["is_piracy"]


def parse_categorize(resp: dict, post: PostRecord) -> PostVerdict:
    labels = resp.get("labels")
    if not isinstance(labels, list):
        raise AdapterError(f"categorize reply lacks labels: {resp!r}")
    try:
        assigned = tuple(
            AssignedLabel(TaxonomyLabel(x["group"], x["leaf"]), str(x.get("justification", "")))
            for x in labels
        )
        return PostVerdict(post.channel_id, post.post_id, True, assigned)
    except (KeyError, TypeError, ValueError) as exc:
        raise AdapterError(f"bad label in reply: {exc}") from exc


@dataclass
class _Fallback:
    fallback: RuleClassifier = field(default_factory=RuleClassifier)
    failures: int = 0

    def _remote(self, payload: dict) -> dict:
        raise NotImplementedError

    def _ask(self, op: str, post: PostRecord) -> dict | None:
        try:
            resp = self._remote(request(op, post))
            if not isinstance(resp, dict):
                raise AdapterError("reply is not a JSON object")
            if "error" in resp:
                raise AdapterError(str(resp["error"]))
            return resp
        except (AdapterError, OSError, ValueError) as exc:
            self.failures += 1
            log.warning("classifier adapter %s failed for %s/%s (%s); using fallback",
                        op, post.channel_id, post.post_id, exc)
            return None

    def detect(self, post: PostRecord) -> bool:
        resp = self._ask("detect", post)
        if resp is not None:
            try:
                return parse_detect(resp)
            except AdapterError as exc:
                self.failures += 1
                log.warning("%s; using fallback", exc)
        return self.fallback.detect(post)

    def categorize(self, post: PostRecord) -> PostVerdict:
        resp = self._ask("categorize", post)
        if resp is not None:
            try:
                return parse_categorize(resp, post)
            except AdapterError as exc:
                self.failures += 1
                log.warning("%s; using fallback", exc)
        return self.fallback.categorize(post)


def _pump(stream, sink: queue.Queue) -> None:
    try:
        for line in stream:
            sink.put(line)
    except (OSError, ValueError):
        pass
    sink.put(None)  # end of stream: the child exited or closed stdout


@dataclass
class SubprocessAdapter(_Fallback):
    """Keeps one child process; one request line in, one reply line out."""

    command: list[str] = field(default_factory=list)
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()
        self._lock = threading.Lock()

    def _start(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
            self._lines = queue.Queue()
            threading.Thread(target=_pump, args=(self._proc.stdout, self._lines), daemon=True).start()
        return self._proc

    def _remote(self, payload: dict) -> dict:
        with self._lock:
            proc = self._start()
            try:
                proc.stdin.write(json.dumps(payload, sort_keys=True) + "\n")
                proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                self.close()
                raise AdapterError(f"child process unavailable: {exc}") from exc
            try:
                line = self._lines.get(timeout=self.timeout)
            except queue.Empty:
                self.close()
                raise AdapterError(f"no reply within {self.timeout}s") from None
            if line is None:
                self.close()
                raise AdapterError("child process exited")
        return json.loads(line)

    def close(self) -> None:
        if self._proc is not None:
            if self._proc.poll() is None:
                self._proc.kill()
            self._proc.wait()
            for fh in (self._proc.stdin, self._proc.stdout):
                try:
                    fh.close()
                except OSError:
                    pass
            self._proc = None


@dataclass
class HttpAdapter(_Fallback):
    """POSTs each request as a JSON body to ``url``."""

    url: str = ""
    timeout: float = DEFAULT_TIMEOUT

    def _remote(self, payload: dict) -> dict:
        req = urllib.request.Request(
            self.url,
            data=json.dumps(payload, sort_keys=True).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read().decode("utf-8"))
        except urllib.error.URLError as exc:
            raise AdapterError(str(exc)) from exc

    def close(self) -> None:
        pass


def make_classifier(spec: str, fallback: RuleClassifier, timeout: float = DEFAULT_TIMEOUT):
    """``rules``, ``subprocess:<command line>`` or ``http:<url>``."""
    spec = spec.strip()
    if spec in ("", "rules"):
        return fallback
    kind, _, arg = spec.partition(":")
    if kind == "subprocess" and arg:
        return SubprocessAdapter(fallback=fallback, command=shlex.split(arg), timeout=timeout)
    if kind == "http" and arg:
        return HttpAdapter(fallback=fallback, url=arg, timeout=timeout)
    raise ValueError(f"unknown classifier spec {spec!r}")
