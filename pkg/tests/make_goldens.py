"""Regenerate the golden files under tests/golden/.

Run from the repository root after an intentional change to the
serialization formats or the sampler draw order:

    python3 tests/make_goldens.py

Golden files pin the RNG stream and the document byte layout; any
unintended drift fails acceptance criterion 7.
"""

import shutil
import tempfile
from pathlib import Path

from scengen.graphml import graph_to_graphml
from scengen.persist import Workspace, scenario_to_document
from scengen.scenario import SamplerConfig, sample_scenario

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"


def main() -> None:
    GOLDEN.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        src = root / "maps"
        src.mkdir()
        shutil.copy(HERE / "fixtures" / "fixture_straight.xodr", src / "fixture_straight.xodr")
        workspace = Workspace(root / "cache")
        workspace.ingest(src / "fixture_straight.xodr", spacing=5.0, target_length=50.0)

        bundle = workspace.bundle("fixture_straight")
        (GOLDEN / "fixture_straight_graph.graphml").write_text(graph_to_graphml(bundle.graph))

        config = SamplerConfig(seed=42, fill_percentage=0.5, roi_region_count_range=(2, 2))
        scenario = sample_scenario([bundle], config, workspace.catalog)
        doc = scenario_to_document(scenario, workspace.entry("fixture_straight").digest)
        (GOLDEN / "scenario_straight_seed42.json").write_text(doc)
    print(f"wrote goldens to {GOLDEN}")


if __name__ == "__main__":
    main()
