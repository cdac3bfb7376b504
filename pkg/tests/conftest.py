from pathlib import Path

import pytest

from scengen.assets import load_asset_catalog
from scengen.lanegraph import build_lane_graph, build_pedestrian_graph, merge_graphs
from scengen.opendrive import parse_opendrive
from scengen.regions import Roi, segment_regions
from scengen.scenario import MapBundle

FIXTURES = Path(__file__).parent / "fixtures"
SPACING = 5.0
STRAIGHT_FULL_ROI = Roi(("road:1:0", "road:1:1"))
TJUNCTION_FULL_ROI = Roi(("junction:100", "road:1:0", "road:2:0", "road:3:0"))


@pytest.fixture(scope="session")
def straight_path() -> Path:
    return FIXTURES / "fixture_straight.xodr"


@pytest.fixture(scope="session")
def tjunction_path() -> Path:
    return FIXTURES / "fixture_tjunction.xodr"


@pytest.fixture(scope="session")
def straight_network(straight_path):
    return parse_opendrive(straight_path.read_text())


@pytest.fixture(scope="session")
def tjunction_network(tjunction_path):
    return parse_opendrive(tjunction_path.read_text())


@pytest.fixture(scope="session")
def straight_graph(straight_network):
    return build_lane_graph(straight_network, SPACING, "fixture_straight")


@pytest.fixture(scope="session")
def straight_ped_graph(straight_network):
    return build_pedestrian_graph(straight_network, SPACING, "fixture_straight")


@pytest.fixture(scope="session")
def tjunction_graph(tjunction_network):
    return build_lane_graph(tjunction_network, SPACING, "fixture_tjunction")


@pytest.fixture(scope="session")
def tjunction_ped_graph(tjunction_network):
    return build_pedestrian_graph(tjunction_network, SPACING, "fixture_tjunction")


@pytest.fixture(scope="session")
def catalog():
    return load_asset_catalog()


@pytest.fixture(scope="session")
def straight_bundle(straight_network, straight_graph, straight_ped_graph):
    partition = segment_regions(
        straight_graph, straight_network, 50.0, pedestrian_graph=straight_ped_graph
    )
    return MapBundle(
        map_id="fixture_straight",
        graph=merge_graphs(straight_graph, straight_ped_graph),
        partition=partition,
    )


@pytest.fixture(scope="session")
def tjunction_bundle(tjunction_network, tjunction_graph, tjunction_ped_graph):
    partition = segment_regions(
        tjunction_graph, tjunction_network, 100.0, pedestrian_graph=tjunction_ped_graph
    )
    return MapBundle(
        map_id="fixture_tjunction",
        graph=merge_graphs(tjunction_graph, tjunction_ped_graph),
        partition=partition,
    )
