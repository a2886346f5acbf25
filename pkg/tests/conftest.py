import pytest

from expchar.distributions import DistributionSpec

FAMILY_SPECS = [
    DistributionSpec.exponential(1.0),
    DistributionSpec.exponential(2.5),
    DistributionSpec.weibull(0.5),
    DistributionSpec.weibull(2.0, 1.5),
    DistributionSpec.gamma(0.4),
    DistributionSpec.gamma(2.0),
    DistributionSpec.lognormal(0.8, 2.0),
    DistributionSpec.uniform(3.0),
]


@pytest.fixture(params=FAMILY_SPECS, ids=lambda s: f"{s.family.value}-{s.scale}-{s.shape}")
def any_spec(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" in props and rep.when == "call":
                lines.append((rep.nodeid, "PASS" if outcome == "passed" else "FAIL", props["criterion"]))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, status, label in sorted(lines, key=lambda t: t[2]):
            terminalreporter.write_line(f"{status}  {label}")
