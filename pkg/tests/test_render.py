import math

import pytest

from primeweb import web as W
from primeweb.render import law_rows_to_csv, render_ray_law, render_web


@pytest.fixture(scope="module")
def w3(engine):
    return W.build_approx_web(engine, rotations=3)


def test_render_web_svg(tmp_path, w3):
    out = render_web(w3, tmp_path / "web.svg")
    text = out.read_text()
    assert text.lstrip().startswith("<?xml")
    assert 'height="576pt"' in text or "svg" in text
    assert "#dc143c" in text.lower()  # the highlighted ray is stroked distinctly


def test_render_web_deterministic(tmp_path, w3):
    a = render_web(w3, tmp_path / "a.svg").read_bytes()
    b = render_web(w3, tmp_path / "b.svg").read_bytes()
    assert a == b


def test_render_web_with_trapezoid(tmp_path, engine, w3):
    t = W.trapezoid(engine, 1, 19, 1, 1)
    out = render_web(w3, tmp_path / "t.svg", trapezoid=t)
    assert "#ff8c00" in out.read_text().lower()


def test_render_ray_law(tmp_path):
    rows = [
        {"depth": n, "value": 10 * n, "predicted": float(n), "epsilon": 0.01 * n}
        for n in range(1, 6)
    ]
    out = render_ray_law(rows, tmp_path / "law.svg")
    assert out.exists() and out.stat().st_size > 0


def test_law_csv():
    rows = [{"depth": 1, "value": 83, "predicted": 0.97, "epsilon": 0.03}]
    text = law_rows_to_csv(rows)
    assert text.splitlines()[0] == "depth,value,predicted,epsilon"
    assert "83" in text
