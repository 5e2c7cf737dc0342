import pytest


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Keep tests away from the user's ~/.qpsoc settings and adapter override."""
    monkeypatch.setenv("QPSOC_SETTINGS_DIR", str(tmp_path / "settings"))
    monkeypatch.delenv("QPSOC_ADAPTER", raising=False)


@pytest.fixture
def write_instance(tmp_path):
    """Write a SparseQP as an instance file and return its path."""
    from qpsoc.app.core.instance import dump_instance

    def write(qp, name="instance.json"):
        path = tmp_path / name
        path.write_text(dump_instance(qp), encoding="utf-8")
        return str(path)

    return write
