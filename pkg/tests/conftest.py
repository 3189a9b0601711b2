import pytest


@pytest.fixture(autouse=True)
def _clear_seed_env(monkeypatch):
    # keep the host environment from silently reseeding every run
    monkeypatch.delenv("UBSS_SEED", raising=False)
