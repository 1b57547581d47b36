"""Shared test helpers: deterministic stub RNG and config builders."""

import pytest

from fusenet.network import LinkSpec, NetworkConfig, Strategy
from fusenet.pair_algebra import LinkModel


class StubRng:
    """Feeds a prescribed sequence of uniform draws to machine operations."""

    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


@pytest.fixture
def stub_rng():
    return StubRng


def chain_config(
    hops,
    n=1,
    m=1,
    p=1.0,
    fidelity=1.0,
    cycles=100,
    seed=0,
    strategy=Strategy.RAW,
    tau_slot_ns=0,
    proc_ns=0,
    butterfly=False,
    cycle_period_ns=None,
):
    """Uniform-parameter chain over the given hop lengths (km)."""
    links = [
        LinkSpec(
            LinkModel(length_km=length, p_success=p, raw_fidelity=fidelity),
            n_fusiliers=n,
            m_fusilands=m,
        )
        for length in hops
    ]
    return NetworkConfig(
        nodes=[f"n{i}" for i in range(len(hops) + 1)],
        links=links,
        tau_slot_ns=tau_slot_ns,
        proc_ns=proc_ns,
        strategy=strategy,
        seed=seed,
        cycles=cycles,
        butterfly=butterfly,
        cycle_period_ns=cycle_period_ns,
    )
