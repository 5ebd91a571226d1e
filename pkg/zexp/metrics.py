"""Prometheus instrumentation for verification runs and numeric expansions."""

from __future__ import annotations

from pathlib import Path

from prometheus_client import REGISTRY, Counter, Histogram, generate_latest

# Identities checked per suite, split by outcome.
IDENTITY_COUNTER = Counter(
    "zexp_identities_checked_total",
    "Number of algebraic identities checked",
    labelnames=("suite", "status"),
)

EXPANSION_LATENCY = Histogram(
    "zexp_expansion_seconds",
    "Wall time of numeric expansion evaluations",
    labelnames=("side",),
)


def record_identity(suite: str, passed: bool) -> None:
    IDENTITY_COUNTER.labels(suite=suite, status="pass" if passed else "fail").inc()


def observe_expansion(side: str, seconds: float) -> None:
    EXPANSION_LATENCY.labels(side=side).observe(seconds)


def render_metrics() -> str:
    return generate_latest(REGISTRY).decode("utf-8")


def write_metrics(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_metrics(), encoding="utf-8")
