import json
from pathlib import Path

import pytest

from filtrahom.builders_image import read_pgm, threshold_filtration
from filtrahom.complex_core import filtration_from_json
from filtrahom.filtration_groups import filtration_homology

DATA = Path(__file__).parent / "data"
FIG1_THRESHOLDS = [2, 3, 4]


@pytest.fixture(scope="session")
def fig1_image_fh():
    return filtration_homology(threshold_filtration(read_pgm(DATA / "fig1.pgm"), FIG1_THRESHOLDS))


@pytest.fixture(scope="session")
def fig1_abstract_fh():
    doc = json.loads((DATA / "fig1_filtration.json").read_text())
    return filtration_homology(filtration_from_json(doc))


@pytest.fixture(scope="session", params=["image", "abstract"])
def fig1(request, fig1_image_fh, fig1_abstract_fh):
    return fig1_image_fh if request.param == "image" else fig1_abstract_fh
