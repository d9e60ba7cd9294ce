import pytest
from jinja2 import TemplateNotFound, UndefinedError

from bangbang_rabi.utils.records import RunRecord, read_csv, write_csv
from bangbang_rabi.utils.schedule_file import load_schedule, parse_schedule
from bangbang_rabi.utils.template_renderer import TemplateRenderer, render_summary


def _record() -> RunRecord:
    return RunRecord(
        command="search",
        argv=["search", "--algo", "pga"],
        params={"omega_c": 1.0, "omega_a": 1.0, "g": 0.1, "n_max": 60},
        search={
            "total_time": 15.0,
            "dt": 0.2,
            "length": 75,
            "beam_exponent": 12,
            "protocol": "switch-off",
            "workers": 1,
        },
        protocol="switch-off",
        result={"best_sequence": "1101", "best_photon_number": 0.1 + 0.2, "t0": None},
        n_max=60,
        wall_clock_seconds=1.25,
    )


def test_run_record_round_trips(tmp_path):
    record = _record()
    assert RunRecord.from_dict(record.to_dict()) == record
    path = record.save(tmp_path / "nested" / "search.json")
    assert RunRecord.load(path) == record


def test_run_record_rejects_unknown_schema():
    data = _record().to_dict()
    data["schema_version"] = "0.1"
    with pytest.raises(ValueError):
        RunRecord.from_dict(data)


def test_csv_keeps_full_precision(tmp_path):
    rows = [{"t": 0.1 + 0.2, "n_ph": 1 / 3, "bit": 1}, {"t": 1e-17, "n_ph": 0.0, "bit": -1}]
    path = write_csv(tmp_path / "out.csv", ["t", "n_ph", "bit"], rows)
    assert path.read_text(encoding="utf-8").splitlines()[0] == "t,n_ph,bit"
    assert read_csv(path) == [
        {"t": 0.1 + 0.2, "n_ph": 1 / 3, "bit": 1.0},
        {"t": 1e-17, "n_ph": 0.0, "bit": -1.0},
    ]


def test_csv_rejects_missing_columns(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "out.csv", ["t", "n_ph"], [{"t": 0.0}])


def test_parse_schedule():
    schedule = parse_schedule(
        """
        # switch on, then off
        0.5 0.1
        1e-1  0   # trailing comment

        .25 -0.1
        """
    )
    assert schedule.segments == ((0.5, 0.1), (0.1, 0.0), (0.25, -0.1))


def test_parse_schedule_reports_line_numbers():
    with pytest.raises(ValueError, match=":2:"):
        parse_schedule("0.5 0.1\n0.5\n")
    with pytest.raises(ValueError):
        parse_schedule("# nothing here\n")
    with pytest.raises(ValueError):
        parse_schedule("0 0.1\n")


def test_load_schedule(tmp_path):
    path = tmp_path / "pulses.txt"
    path.write_text("0.2 0.1\n0.2 0\n", encoding="utf-8")
    assert load_schedule(path).total_duration == pytest.approx(0.4)
    with pytest.raises(FileNotFoundError):
        load_schedule(tmp_path / "missing.txt")


def test_render_summary():
    text = render_summary(_record())
    assert text.startswith("bangbang-rabi search")
    assert "protocol:     switch-off" in text
    assert "best_sequence:" in text
    assert "invariants:   passed" in text


def test_template_renderer_errors(tmp_path):
    renderer = TemplateRenderer()
    assert "run-summary" in renderer.get_template_names()
    with pytest.raises(TemplateNotFound):
        renderer.get_template("missing")
    with pytest.raises(UndefinedError):
        renderer.render("run-summary")
    with pytest.raises(FileNotFoundError):
        TemplateRenderer(tmp_path / "absent")
