import numpy as np
import pytest

from twinwatch.detection import DetectionThreshold
from twinwatch.distributions import NormalSpec
from twinwatch.geometry import Point2D, Rect
from twinwatch.simulation import SimConfig, TrafficTable
from twinwatch.station import (
    Camera,
    CameraPreset,
    Edge,
    MountSegment,
    ServicePoints,
    StationLayout,
    Zone,
    ZoneKind,
    default_layout_path,
    load_layout,
    validate_layout,
)


@pytest.fixture(scope="session")
def layout():
    return load_layout(default_layout_path())


def make_corridor_layout() -> StationLayout:
    """A straight 40 m corridor walked west to east: entrance, two loiter
    waypoints, exit, and a camera rail near the east end."""
    nodes = {
        "n_w": Point2D(2, 3),
        "n_m1": Point2D(15, 3),
        "n_m2": Point2D(25, 3),
        "n_e": Point2D(38, 3),
    }
    edges = tuple(Edge(a, b, nodes[a].distance_to(nodes[b]))
                  for a, b in [("n_w", "n_m1"), ("n_m1", "n_m2"), ("n_m2", "n_e")])
    zones = (
        Zone("corr_ent", ZoneKind.ENTRANCE, Rect(0, 0, 4, 6), ("n_w",)),
        Zone("corr_mid", ZoneKind.CONCOURSE, Rect(4, 0, 36, 6), ("n_m1", "n_m2")),
        Zone("corr_exit", ZoneKind.EXIT, Rect(36, 0, 40, 6), ("n_e",)),
    )
    lay = StationLayout(
        name="corridor", bounds=Rect(0, 0, 40, 6), zones=zones,
        nav_nodes=nodes, nav_edges=edges,
        service_points=ServicePoints((), ()),
        camera_mounts=(MountSegment("m_rail", Point2D(39, 0), Point2D(39, 6)),),
        presets={},
    )
    validate_layout(lay)
    return lay


@pytest.fixture(scope="session")
def corridor_layout():
    return make_corridor_layout()


def corridor_camera(pan_deg: float) -> Camera:
    return Camera(id="c1", position=Point2D(39, 3), pan_deg=pan_deg,
                  max_range_m=19.0)


def corridor_sim_config(pan_deg: float, seed: int,
                        threshold: float = 0.68) -> SimConfig:
    """Suspect-only corridor run tuned so accuracy peaks sharply when the
    camera faces the oncoming walkers (pan 180)."""
    return SimConfig(
        preset=CameraPreset("corridor", (corridor_camera(pan_deg),)),
        mode="geometric", seed=seed, scenario=1, record_samples=False,
        traffic=TrafficTable.negligible(), ticket_machine_fraction=0.0,
        threshold=DetectionThreshold(threshold),
        suspects_per_hour=NormalSpec(400, 1.0, min_clamp=0.0),
    )


CORRIDOR_OBJECTIVE_OVERRIDES = {
    "traffic": TrafficTable.negligible(),
    "ticket_machine_fraction": 0.0,
    "suspects_per_hour": NormalSpec(400, 1.0, min_clamp=0.0),
}
