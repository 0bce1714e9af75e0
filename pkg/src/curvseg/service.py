"""Stateless HTTP service exposing segmentation to the interactive UI.

POST /api/segment takes a base64 PNG (or a corpus case name) plus scribble
seeds and returns the mask and solve statistics. Scribbles are rasterized
server-side with the same disk rule the UI uses for its preview, so both
sides agree on every painted pixel.
"""

from __future__ import annotations

import base64
from pathlib import Path
from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ._imagecodec import ImageFormatError, read_png, write_png
from .energy import AttractionMode, DEFAULT_LAMBDA
from .lattice import GrayImage, SeedLabel, seeds_from_scribbles
from .segmenter import SegmentationParams, segment
from .synthcorpus import default_cases

MAX_SIDE = 1024

_LUMA = np.array([0.299, 0.587, 0.114])


class Scribble(BaseModel):
    cls: Literal["fg", "bg"] = Field(alias="class")
    radius: float = 0.0
    points: list[tuple[float, float]]

    model_config = {"populate_by_name": True}


class SeedSpec(BaseModel):
    strokes: list[Scribble]


class ParamSpec(BaseModel):
    p: float = 2.0
    beta: float = 20.0
    lam: float = Field(default=DEFAULT_LAMBDA, alias="lambda")
    mode: Literal["magnitude", "signed"] = "magnitude"
    probing: bool = True
    fallback: Literal["bg", "fg"] = "bg"

    model_config = {"populate_by_name": True}


class SegmentRequest(BaseModel):
    image: str  # base64 PNG or corpus case name
    seeds: SeedSpec
    params: ParamSpec | None = None


class Stats(BaseModel):
    energy: float
    lower_bound: float
    unlabeled_count: int
    runtime_ms: float


class SegmentResponse(BaseModel):
    mask: str  # base64 PNG, 0/255
    stats: Stats
    params: dict


def _decode_image(spec: str) -> GrayImage:
    cases = default_cases()
    if spec in cases:
        return cases[spec].image
    try:
        raw = base64.b64decode(spec, validate=True)
        pixels = read_png(raw)
    except (ValueError, ImageFormatError) as exc:
        raise HTTPException(status_code=400, detail=f"malformed image: {exc}")
    if pixels.shape[0] > MAX_SIDE or pixels.shape[1] > MAX_SIDE:
        raise HTTPException(status_code=413, detail="image too large")
    if pixels.ndim == 3:
        pixels = np.round(pixels[:, :, :3].astype(np.float64) @ _LUMA)
    return GrayImage.from_array(pixels.astype(np.float64) / 255.0)


def _encode_mask(mask: np.ndarray) -> str:
    png = write_png(np.where(mask != 0, 255, 0).astype(np.uint8))
    return base64.b64encode(png).decode("ascii")


def _encode_gray(data: np.ndarray) -> str:
    png = write_png(np.round(data * 255.0).astype(np.uint8))
    return base64.b64encode(png).decode("ascii")


def create_app(frontend_dir=None) -> FastAPI:
    app = FastAPI(title="curvseg", docs_url=None, redoc_url=None)

    @app.post("/api/segment", response_model=SegmentResponse)
    def api_segment(req: SegmentRequest) -> SegmentResponse:
        image = _decode_image(req.image)
        strokes = [(s.cls, s.radius, s.points) for s in req.seeds.strokes]
        try:
            seeds = seeds_from_scribbles(image.width, image.height, strokes)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        p = req.params or ParamSpec()
        params = SegmentationParams(
            p=p.p,
            beta=p.beta,
            lam=p.lam,
            mode=AttractionMode(p.mode),
            probing=p.probing,
            fallback=p.fallback,
        )
        try:
            result = segment(image, seeds, params)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        r = result.report
        return SegmentResponse(
            mask=_encode_mask(result.mask),
            stats=Stats(
                energy=r.energy_of_completion,
                lower_bound=r.lower_bound,
                unlabeled_count=r.unlabeled_count,
                runtime_ms=r.runtime_ms,
            ),
            params=params.describe(),
        )

    @app.get("/api/corpus")
    def api_corpus() -> list[str]:
        return sorted(default_cases())

    @app.get("/api/corpus/{name}")
    def api_corpus_case(name: str) -> dict:
        cases = default_cases()
        if name not in cases:
            raise HTTPException(status_code=404, detail=f"unknown case {name!r}")
        case = cases[name]
        fg = np.argwhere(case.seeds.labels == SeedLabel.FG)
        bg = np.argwhere(case.seeds.labels == SeedLabel.BG)
        return {
            "name": name,
            "width": case.image.width,
            "height": case.image.height,
            "image": _encode_gray(case.image.data),
            "truth": _encode_mask(case.ground_truth),
            "seeds": {
                # (x, y) point lists, ready to replay as radius-0 scribbles
                "fg": [[int(c), int(r)] for r, c in fg],
                "bg": [[int(c), int(r)] for r, c in bg],
            },
            "description": case.description,
        }

    if frontend_dir:
        frontend_dir = Path(frontend_dir)
        if frontend_dir.is_dir():
            app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")
    return app
