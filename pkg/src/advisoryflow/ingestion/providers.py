"""Transport layer for external data sources.

Every outbound call is an (service, path, params) request resolved by a
provider. Two providers exist: a live HTTP client with retry, rate-limit and
spacing behavior, and a fixture-replay provider reading recorded responses
from ``<root>/<service>/<request-digest>.json``. A recording wrapper captures
live responses verbatim into the same layout so later runs never touch the
network.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urlencode


class IngestionError(Exception):
    """A request could not be satisfied (transport failure, missing token,
    missing fixture)."""


@dataclass(frozen=True)
class SourceClientConfig:
    base_url: str
    auth_token_env_var: str | None = None
    max_parallel_requests: int = 4
    min_request_interval: float = 0.0  # seconds between calls to one service

    def __post_init__(self):
        if self.max_parallel_requests < 1:
            raise ValueError("max_parallel_requests must be >= 1")
        if self.min_request_interval < 0:
            raise ValueError("min_request_interval must be >= 0")


@dataclass(frozen=True)
class ApiRequest:
    service: str
    path: str
    params: tuple[tuple[str, str], ...] = ()

    def canonical(self) -> str:
        return f"{self.service}\n{self.path}\n{urlencode(sorted(self.params))}"


@dataclass(frozen=True)
class ApiResponse:
    status: int
    headers: dict
    body: object

    @property
    def ok(self) -> bool:
        return 200 <= self.status < 300


def request_digest(request: ApiRequest) -> str:
    return hashlib.sha256(request.canonical().encode("utf-8")).hexdigest()


def fixture_path(root: str | Path, request: ApiRequest) -> Path:
    return Path(root) / request.service / f"{request_digest(request)}.json"


class FixtureProvider:
    """Replays recorded responses from a fixture directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def fetch(self, request: ApiRequest) -> ApiResponse:
        path = fixture_path(self.root, request)
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise IngestionError(
                f"no fixture for {request.service} {request.path} "
                f"{dict(request.params)} (expected {path})"
            ) from None
        return ApiResponse(
            status=int(payload.get("status", 200)),
            headers=payload.get("headers", {}),
            body=payload.get("body"),
        )


def write_fixture(root: str | Path, request: ApiRequest, response: ApiResponse) -> Path:
    """Record one exchange verbatim in the fixture layout."""
    path = fixture_path(root, request)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {
        "service": request.service,
        "path": request.path,
        "params": dict(request.params),
        "status": response.status,
        "headers": response.headers,
        "body": response.body,
    }
    path.write_text(
        json.dumps(document, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return path


class HttpProvider:
    """Live client: 3 attempts with exponential backoff starting at 1s;
    rate-limit responses honor server reset hints; per-service request
    spacing and a parallel-request cap from the service config."""

    ATTEMPTS = 3

    def __init__(
        self,
        configs: dict[str, SourceClientConfig],
        session=None,
        sleep=time.sleep,
        clock=time.monotonic,
    ):
        self.configs = configs
        if session is None:
            import requests

            session = requests.Session()
        self.session = session
        self._sleep = sleep
        self._clock = clock
        self._lock = threading.Lock()
        self._last_request: dict[str, float] = {}
        self._semaphores = {
            name: threading.BoundedSemaphore(cfg.max_parallel_requests)
            for name, cfg in configs.items()
        }

    def _auth_headers(self, config: SourceClientConfig) -> dict:
        if not config.auth_token_env_var:
            return {}
        token = os.environ.get(config.auth_token_env_var)
        if token is None:
            raise IngestionError(
                f"environment variable {config.auth_token_env_var} is not set; "
                "export it or run against fixtures"
            )
        return {"Authorization": f"Bearer {token}"}

    def _pace(self, service: str, interval: float) -> None:
        if interval <= 0:
            return
        with self._lock:
            last = self._last_request.get(service)
            now = self._clock()
            wait = 0.0 if last is None else max(0.0, last + interval - now)
            self._last_request[service] = now + wait
        if wait > 0:
            self._sleep(wait)

    @staticmethod
    def _rate_limit_delay(headers, clock_now: float) -> float | None:
        retry_after = headers.get("Retry-After")
        if retry_after is not None:
            try:
                return max(0.0, float(retry_after))
            except ValueError:
                return None
        reset = headers.get("X-RateLimit-Reset")
        if reset is not None:
            try:
                return max(0.0, float(reset) - time.time())
            except ValueError:
                return None
        return None

    def fetch(self, request: ApiRequest) -> ApiResponse:
        try:
            config = self.configs[request.service]
        except KeyError:
            raise IngestionError(f"no client configured for service {request.service!r}")
        headers = self._auth_headers(config)
        url = config.base_url.rstrip("/") + request.path
        last_error = None
        with self._semaphores[request.service]:
            for attempt in range(self.ATTEMPTS):
                self._pace(request.service, config.min_request_interval)
                try:
                    raw = self.session.get(
                        url, params=dict(request.params), headers=headers, timeout=30
                    )
                except Exception as exc:  # requests transport errors
                    last_error = str(exc)
                else:
                    if raw.status_code in (403, 429):
                        delay = self._rate_limit_delay(raw.headers, self._clock())
                        if delay is not None:
                            last_error = f"rate limited (HTTP {raw.status_code})"
                            if attempt + 1 < self.ATTEMPTS:
                                self._sleep(delay)
                            continue
                    if raw.status_code >= 500:
                        last_error = f"HTTP {raw.status_code}"
                    else:
                        try:
                            body = raw.json()
                        except ValueError:
                            body = raw.text
                        return ApiResponse(
                            status=raw.status_code,
                            headers=dict(raw.headers),
                            body=body,
                        )
                if attempt + 1 < self.ATTEMPTS:
                    self._sleep(2.0 ** attempt)  # 1s, 2s
        raise IngestionError(
            f"{request.service} {request.path} {dict(request.params)} failed "
            f"after {self.ATTEMPTS} attempts: {last_error}"
        )


@dataclass
class RecordingProvider:
    """Wraps another provider and records every exchange as a fixture."""

    inner: object
    root: Path = field(default_factory=lambda: Path("fixtures"))

    def fetch(self, request: ApiRequest) -> ApiResponse:
        response = self.inner.fetch(request)
        write_fixture(self.root, request, response)
        return response
