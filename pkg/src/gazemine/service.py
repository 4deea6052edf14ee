"""Session-oriented HTTP/JSON service exposing the analysis engine.

A session bundles one stimulus image, the gaze records of its participants,
the current AOI tree, and mining defaults. Sessions persist as one
self-contained JSON file each (image embedded base64) under the data
directory; derived results are cached in memory keyed by the session
revision, which increments on every mutation.
"""

from __future__ import annotations

import base64
import io
import json
import os
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from PIL import Image, UnidentifiedImageError

from . import __version__
from .encoding import DEFAULT_TAU, encode_path, project_to_level, rle_encode, to_transition_string
from .gaze_csv import GazeCsvError, parse_gaze_csv
from .layout import (
    LayoutParams,
    PatternSelection,
    assign_hues,
    build_graph,
    layout_to_json,
    run_layout,
)
from .mining import (
    PatternTable,
    build_table,
    diff,
    filter_by_threshold,
    patterns_through_aoi,
    similarity_matrix,
)
from .model import (
    AoiTree,
    Rect,
    ScanPath,
    Stimulus,
    add_leaf,
    cut_at_level,
    empty_tree,
    make_group,
    remove_node,
    tree_from_json,
    tree_to_json,
    ungroup,
    validate_tree,
)


class ApiError(Exception):
    def __init__(self, status: int, detail: str, extra: dict | None = None):
        super().__init__(detail)
        self.status = status
        self.detail = detail
        self.extra = extra or {}


@dataclass
class Session:
    id: str
    stimulus: Stimulus
    image_png: bytes
    gaze_csv: str
    paths: dict[str, ScanPath]
    tree: AoiTree
    revision: int = 0
    mining: dict = field(default_factory=lambda: {"k": None, "n": 2, "tau": DEFAULT_TAU})
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def to_envelope(self) -> dict:
        return {
            "id": self.id,
            "image": base64.b64encode(self.image_png).decode("ascii"),
            "width": self.stimulus.width,
            "height": self.stimulus.height,
            "gaze": self.gaze_csv,
            "tree": tree_to_json(self.tree),
            "mining": self.mining,
            "revision": self.revision,
        }


def _decode_image(data: bytes) -> tuple[Stimulus, bytes]:
    try:
        img = Image.open(io.BytesIO(data)).convert("RGB")
    except (UnidentifiedImageError, OSError):
        raise ApiError(415, "image could not be decoded") from None
    pixels = np.asarray(img, dtype=np.uint8)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return Stimulus(img.width, img.height, pixels), buf.getvalue()


def _session_from_envelope(data: dict) -> Session:
    stimulus, png = _decode_image(base64.b64decode(data["image"]))
    gaze = data.get("gaze", "participant,t,x,y\n")
    return Session(
        id=data["id"],
        stimulus=stimulus,
        image_png=png,
        gaze_csv=gaze,
        paths=parse_gaze_csv(gaze, (stimulus.width, stimulus.height)),
        tree=tree_from_json(data["tree"]),
        revision=int(data.get("revision", 0)),
        mining=dict(data.get("mining", {"k": None, "n": 2, "tau": DEFAULT_TAU})),
    )


class SessionStore:
    """In-memory sessions with write-through persistence to one file each."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self._cache: dict[tuple, PatternTable] = {}
        self._strings: dict[tuple, dict[str, str]] = {}
        for name in sorted(os.listdir(data_dir)):
            if name.endswith(".json"):
                with open(os.path.join(data_dir, name), "r", encoding="utf-8") as fh:
                    session = _session_from_envelope(json.load(fh))
                self.sessions[session.id] = session

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise ApiError(404, f"unknown session {session_id}")
        return session

    def persist(self, session: Session) -> None:
        path = os.path.join(self.data_dir, f"{session.id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(session.to_envelope(), fh, ensure_ascii=False)

    def create(self, image: bytes, gaze: str) -> Session:
        stimulus, png = _decode_image(image)
        try:
            paths = parse_gaze_csv(gaze, (stimulus.width, stimulus.height))
        except GazeCsvError as exc:
            raise ApiError(422, str(exc), {"row": exc.row}) from None
        session = Session(
            id=uuid.uuid4().hex[:12],
            stimulus=stimulus,
            image_png=png,
            gaze_csv=gaze,
            paths=paths,
            tree=empty_tree(),
        )
        self.sessions[session.id] = session
        self.persist(session)
        return session

    def commit_tree(self, session: Session, tree: AoiTree) -> None:
        violations = validate_tree(tree, (session.stimulus.width, session.stimulus.height))
        if violations:
            raise ApiError(409, "tree validation failed", {"violations": violations})
        session.tree = tree
        session.revision += 1
        self.persist(session)

    # -- derived results, cached per revision --------------------------------

    def transition_strings(self, session: Session, k: int, tau: int) -> dict[str, str]:
        key = (session.id, session.revision, k, tau)
        if key not in self._strings:
            strings = {}
            for participant in sorted(session.paths):
                rle = rle_encode(encode_path(session.paths[participant], session.tree))
                rle = project_to_level(rle, session.tree, k)
                strings[participant] = to_transition_string(rle, tau)
            self._strings[key] = strings
        return self._strings[key]

    def table(self, session: Session, k: int, n: int, tau: int) -> PatternTable:
        key = (session.id, session.revision, k, n, tau)
        if key not in self._cache:
            strings = self.transition_strings(session, k, tau)
            self._cache[key] = build_table(strings, n, k)
        return self._cache[key]


def _shrink_to_fit(rect: Rect, obstacles: list[Rect]) -> Rect | None:
    """Trim the incoming rect along one axis per overlap, losing minimal area.

    Existing AOIs are never moved; the new rect gives way. Returns None when
    nothing of it survives.
    """
    for obs in obstacles:
        if not rect.overlaps(obs):
            continue
        options = []
        cut_left = obs.right - rect.x
        if rect.w - cut_left > 0:
            options.append(Rect(rect.x + cut_left, rect.y, rect.w - cut_left, rect.h))
        cut_right = rect.right - obs.x
        if rect.w - cut_right > 0:
            options.append(Rect(rect.x, rect.y, rect.w - cut_right, rect.h))
        cut_top = obs.bottom - rect.y
        if rect.h - cut_top > 0:
            options.append(Rect(rect.x, rect.y + cut_top, rect.w, rect.h - cut_top))
        cut_bottom = rect.bottom - obs.y
        if rect.h - cut_bottom > 0:
            options.append(Rect(rect.x, rect.y, rect.w, rect.h - cut_bottom))
        if not options:
            return None
        rect = max(options, key=lambda r: r.area)
    return rect


def _int_param(value, name: str, default: int | None = None, minimum: int | None = None) -> int:
    if value is None:
        if default is None:
            raise ApiError(400, f"missing parameter {name}")
        return default
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise ApiError(400, f"parameter {name} must be an integer") from None
    if minimum is not None and out < minimum:
        raise ApiError(400, f"parameter {name} must be >= {minimum}")
    return out


def create_app(data_dir: str | None = None) -> FastAPI:
    store = SessionStore(data_dir or os.environ.get("DATA_DIR", "./data"))
    app = FastAPI(title="gazemine", version=__version__)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def handle_api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"detail": exc.detail, **exc.extra})

    def resolve_level(session: Session, k) -> int:
        depth = max(session.tree.depth, 1)
        level = _int_param(k, "k", default=depth)
        if not 1 <= level <= depth:
            raise ApiError(400, f"level k={level} out of range 1..{depth}")
        return level

    def mining_params(session: Session, k, n, tau) -> tuple[int, int, int]:
        level = resolve_level(session, k)
        n_val = _int_param(n, "n", default=session.mining.get("n", 2), minimum=1)
        tau_val = _int_param(tau, "tau", default=session.mining.get("tau", DEFAULT_TAU), minimum=1)
        return level, n_val, tau_val

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/sessions")
    def list_sessions():
        return [
            {"id": s.id, "participants": sorted(s.paths), "revision": s.revision}
            for s in store.sessions.values()
        ]

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.json()
        if "image" not in body or "gaze" not in body:
            raise ApiError(400, "body must contain image (base64) and gaze (csv text)")
        try:
            image = base64.b64decode(body["image"], validate=True)
        except Exception:
            raise ApiError(415, "image is not valid base64") from None
        session = store.create(image, body["gaze"])
        return {
            "id": session.id,
            "width": session.stimulus.width,
            "height": session.stimulus.height,
            "participants": sorted(session.paths),
            "revision": session.revision,
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = store.get(session_id)
        return {
            "id": session.id,
            "width": session.stimulus.width,
            "height": session.stimulus.height,
            "participants": {p: len(session.paths[p]) for p in sorted(session.paths)},
            "tree": tree_to_json(session.tree),
            "depth": session.tree.depth,
            "mining": session.mining,
            "revision": session.revision,
        }

    @app.post("/sessions/{session_id}/detect")
    async def auto_detect(session_id: str, request: Request):
        from .detect import DetectionParams, detect_aois

        session = store.get(session_id)
        body = await request.json()
        z = _int_param(body.get("z"), "z", minimum=1)
        g = _int_param(body.get("g"), "g", minimum=2)
        with session.lock:
            tree = detect_aois(session.stimulus, DetectionParams(z=z, g=g))
            store.commit_tree(session, tree)
        return {"tree": tree_to_json(session.tree), "revision": session.revision}

    @app.patch("/sessions/{session_id}/aois")
    async def edit_aois(session_id: str, request: Request):
        session = store.get(session_id)
        body = await request.json()
        ops = body.get("ops")
        if not isinstance(ops, list) or not ops:
            raise ApiError(400, "body must contain a non-empty ops list")
        with session.lock:
            tree = session.tree
            for op in ops:
                kind = op.get("op")
                try:
                    if kind == "add-rect":
                        rect = Rect(*[int(v) for v in op["rect"]])
                        trimmed = _shrink_to_fit(rect, [n.rect for n in tree.leaves()])
                        if trimmed is None:
                            raise ApiError(409, "new AOI fully overlaps existing AOIs",
                                           {"violations": ["empty-after-trim"]})
                        tree = add_leaf(tree, trimmed, op.get("label"))
                    elif kind == "delete":
                        tree = remove_node(tree, int(op["id"]))
                    elif kind == "group":
                        tree = make_group(tree, [int(m) for m in op["members"]], op.get("label"))
                    elif kind == "ungroup":
                        tree = ungroup(tree, int(op["id"]))
                    else:
                        raise ApiError(400, f"unknown op {kind!r}")
                except (KeyError, TypeError):
                    raise ApiError(400, f"malformed {kind!r} op") from None
                except ValueError as exc:
                    raise ApiError(409, str(exc), {"violations": [str(exc)]}) from None
            store.commit_tree(session, tree)
        return {"tree": tree_to_json(session.tree), "revision": session.revision}

    @app.get("/sessions/{session_id}/aois")
    def get_aois(session_id: str, k=None):
        session = store.get(session_id)
        level = resolve_level(session, k)
        if not session.tree.leaves():
            return {"level": level, "aois": []}
        colors = assign_hues(session.tree)
        return {
            "level": level,
            "aois": [
                {
                    "id": e.node.id,
                    "char": e.char,
                    "label": e.node.label,
                    "rect": [e.rect.x, e.rect.y, e.rect.w, e.rect.h],
                    "hue": round(colors.display[e.node.id], 6),
                    "group": e.node.is_leaf is False,
                }
                for e in cut_at_level(session.tree, level)
            ],
        }

    @app.get("/sessions/{session_id}/patterns")
    def query_patterns(session_id: str, k=None, n=None, tau=None, mode: str = "total",
                       p: str | None = None, q: str | None = None,
                       sort: str | None = None, op: str | None = None,
                       threshold=None):
        session = store.get(session_id)
        level, n_val, tau_val = mining_params(session, k, n, tau)
        table = store.table(session, level, n_val, tau_val)
        if op is not None:
            if op not in ("more", "less"):
                raise ApiError(400, "op must be more or less")
            table = filter_by_threshold(table, op, _int_param(threshold, "threshold", minimum=0))

        if mode == "diff":
            if p is None or q is None:
                raise ApiError(400, "diff mode needs participants p and q")
            if p == q:
                raise ApiError(400, "participants p and q must differ")
            for participant in (p, q):
                if participant not in table.participants:
                    raise ApiError(404, f"unknown participant {participant}")
            report = diff(table, p, q)
            return {
                "mode": "diff",
                "level": level,
                "n": n_val,
                "tau": tau_val,
                "pair": [p, q],
                "common": [
                    {"chars": e.pattern, "base": e.base, "surplus": e.surplus, "owner": e.owner}
                    for e in report.common
                ],
                "uniqueP": [{"chars": e.pattern, "count": e.count} for e in report.unique_p],
                "uniqueQ": [{"chars": e.pattern, "count": e.count} for e in report.unique_q],
            }
        if mode != "total":
            raise ApiError(400, "mode must be total or diff")

        if sort is not None and sort not in table.participants:
            raise ApiError(404, f"unknown participant {sort}")
        ordered = table.sorted_patterns(by_participant=sort)
        out = {
            "mode": "total",
            "level": level,
            "n": n_val,
            "tau": tau_val,
            "participants": list(table.participants),
            "patterns": [
                {
                    "chars": pat,
                    "total": table.total(pat),
                    "support": table.support(pat),
                    "perParticipant": dict(sorted(table.counts[pat].items())),
                }
                for pat in ordered
            ],
        }
        if sort is not None:
            out["sortParticipant"] = sort
            out["stackOrder"] = [sort] + [x for x in table.participants if x != sort]
        return out

    @app.get("/sessions/{session_id}/similarity")
    def query_similarity(session_id: str, k=None, n=None, tau=None):
        session = store.get(session_id)
        if len(session.paths) < 2:
            raise ApiError(409, "similarity needs at least 2 participants")
        level, n_val, tau_val = mining_params(session, k, n, tau)
        table = store.table(session, level, n_val, tau_val)
        matrix = similarity_matrix(table)
        return {
            "level": level,
            "n": n_val,
            "tau": tau_val,
            "participants": list(matrix.participants),
            "values": [[round(v, 6) for v in row] for row in matrix.values],
            "argmin": list(matrix.argmin),
            "argmax": list(matrix.argmax),
        }

    def resolve_selection(session: Session, body: dict) -> tuple[list[PatternSelection], int, int, int, int]:
        level, n_val, tau_val = mining_params(session, body.get("k"), body.get("n"), body.get("tau"))
        seed = _int_param(body.get("seed"), "seed", default=0)
        table = store.table(session, level, n_val, tau_val)
        if body.get("patterns") is not None:
            ids = body["patterns"]
            if not isinstance(ids, list) or not ids:
                raise ApiError(400, "patterns must be a non-empty list")
            for pat in ids:
                if pat not in table.counts:
                    raise ApiError(400, f"unknown pattern {pat!r}")
        elif body.get("aoi") is not None:
            mode = body.get("mode", "passes")
            if mode not in ("starts", "passes", "arrives"):
                raise ApiError(400, "mode must be starts, passes, or arrives")
            ids = patterns_through_aoi(table, body["aoi"], mode)
            if not ids:
                raise ApiError(400, f"no patterns {mode} AOI {body['aoi']!r}")
        else:
            raise ApiError(400, "selection is empty: give patterns or aoi")
        selections = [PatternSelection(id=pat, chars=pat, weight=table.total(pat)) for pat in ids]
        return selections, level, n_val, tau_val, seed

    def compute_layout(session: Session, body: dict):
        selections, level, n_val, tau_val, seed = resolve_selection(session, body)
        try:
            graph = build_graph(selections, session.tree, level, seed=seed)
        except ValueError as exc:
            raise ApiError(400, str(exc)) from None
        params = LayoutParams(seed=seed, iterations=_int_param(
            body.get("iterations"), "iterations", default=300, minimum=0))
        graph = run_layout(graph, params)
        return graph, level, n_val, tau_val, seed

    @app.post("/sessions/{session_id}/layout")
    async def layout_endpoint(session_id: str, request: Request):
        session = store.get(session_id)
        body = await request.json()
        graph, level, n_val, tau_val, seed = compute_layout(session, body)
        colors = assign_hues(session.tree)
        out = layout_to_json(graph)
        out.update({
            "level": level,
            "n": n_val,
            "tau": tau_val,
            "seed": seed,
            "aois": [
                {
                    "id": e.node.id,
                    "char": e.char,
                    "rect": [e.rect.x, e.rect.y, e.rect.w, e.rect.h],
                    "hue": round(colors.display[e.node.id], 6),
                }
                for e in cut_at_level(session.tree, level)
            ],
        })
        return out

    @app.get("/sessions/{session_id}/export.svg")
    def export_svg(session_id: str, patterns: str | None = None, aoi: str | None = None,
                   mode: str = "passes", k=None, n=None, tau=None, seed=None, image: int = 0):
        from .render import render_svg

        session = store.get(session_id)
        body: dict = {"k": k, "n": n, "tau": tau, "seed": seed}
        if patterns:
            body["patterns"] = patterns.split(",")
        elif aoi:
            body["aoi"] = aoi
            body["mode"] = mode
        else:
            raise ApiError(400, "selection is empty: give patterns or aoi")
        graph, level, _, _, _ = compute_layout(session, body)
        svg = render_svg(
            session.stimulus.width,
            session.stimulus.height,
            cut_at_level(session.tree, level),
            assign_hues(session.tree),
            graph,
            stimulus=session.stimulus if image else None,
        )
        return Response(content=svg, media_type="image/svg+xml")

    return app
