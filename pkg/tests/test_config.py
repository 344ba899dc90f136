from magfib.config import get_settings


def test_settings_read_the_environment(monkeypatch):
    monkeypatch.setenv("MAGFIB_JOBS", "3")
    monkeypatch.setenv("MAGFIB_MAX_CELLS", "17")
    monkeypatch.setenv("MAGFIB_CHECK_STEPS", "yes")
    monkeypatch.setenv("MAGFIB_OUTPUT_FORMAT", "structured")
    settings = get_settings()
    assert settings.jobs == 3
    assert settings.max_cells == 17
    assert settings.check_steps is True
    assert settings.output_format == "structured"


def test_settings_defaults(monkeypatch):
    for name in ("MAGFIB_JOBS", "MAGFIB_MAX_CELLS", "MAGFIB_CHECK_STEPS"):
        monkeypatch.delenv(name, raising=False)
    settings = get_settings()
    assert settings.jobs >= 1
    assert settings.max_cells > 0
