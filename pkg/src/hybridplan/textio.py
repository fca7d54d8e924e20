"""Text rendering and parsing: problem serialization, verbalized plans,
search trajectories, and meta-plans, plus the three-corpus dataset
emitter.

The verbalization grammar is versioned; every emitted record embeds the
version string and a structured mirror of its target text, and the
parsers reproduce that mirror exactly (round-trip identity).
"""

from __future__ import annotations

import hashlib
import json
import os
import re

from .domains import MazeGrid, PlanningProblem, render_maze
from .search import VALID

TEMPLATE_VERSION = "grammar-v1"

MAZE_ACTION_SET = {"up", "down", "left", "right"}


class ParseError(ValueError):
    def __init__(self, message, line_no=None, token=None):
        detail = message
        if line_no is not None:
            detail += f" (line {line_no}"
            if token is not None:
                detail += f", token {token!r}"
            detail += ")"
        super().__init__(detail)
        self.line_no = line_no
        self.token = token


# ---------------------------------------------------------------- states

def render_state(state):
    if isinstance(state, tuple) and state and isinstance(state[0], tuple):
        return "|".join(",".join(stack) for stack in state)
    if isinstance(state, tuple) and len(state) == 2 and all(isinstance(v, int) for v in state):
        return f"({state[0]},{state[1]})"
    if state == ():  # zero-block edge case
        return ""
    raise ValueError(f"unrenderable state {state!r}")


_MAZE_STATE_RE = re.compile(r"^\((-?\d+),(-?\d+)\)$")


def parse_state(text, line_no=None):
    text = text.strip()
    m = _MAZE_STATE_RE.match(text)
    if m:
        return (int(m.group(1)), int(m.group(2)))
    stacks = []
    for part in text.split("|"):
        blocks = [b for b in part.split(",") if b]
        if not blocks:
            raise ParseError("empty stack in state", line_no, text)
        stacks.append(tuple(blocks))
    return tuple(stacks)


# ---------------------------------------------------------------- actions

def render_action(action):
    if isinstance(action, str):
        return action
    block, dest = action
    return f"move({block},{dest})"


_MOVE_RE = re.compile(r"^move\((\w+),(\w+)\)$")


def parse_action(token, line_no=None):
    token = token.strip()
    if token in MAZE_ACTION_SET:
        return token
    m = _MOVE_RE.match(token)
    if m:
        return (m.group(1), m.group(2))
    raise ParseError("unknown action", line_no, token)


# ---------------------------------------------------------------- plans

def verbalize_plan(plan):
    lines = ["PLAN:"]
    lines.extend(render_action(a) for a in plan)
    return "\n".join(lines)


def parse_plan_text(text):
    lines = [ln for ln in text.strip().splitlines()]
    if not lines or lines[0].strip() != "PLAN:":
        raise ParseError("expected PLAN: header", 1, lines[0].strip() if lines else "")
    actions = []
    for i, ln in enumerate(lines[1:], start=2):
        ln = ln.strip()
        if not ln:
            continue
        actions.append(parse_action(ln, i))
    return tuple(actions)


# ---------------------------------------------------------------- traces

def _event_line(e):
    if e.validity == VALID:
        scores = f"g={e.g}"
        if e.t is not None:
            scores += f" t={e.t} f={e.f}"
        return (f"step {e.index} | from {render_state(e.parent_state)} "
                f"| action {render_action(e.action)} | valid -> {render_state(e.state)} | {scores}")
    return (f"step {e.index} | from {render_state(e.parent_state)} "
            f"| action {render_action(e.action)} | invalid:{e.reason}")


def verbalize_trace(run):
    lines = [_event_line(e) for e in run.events]
    if run.plan is not None:
        lines.append(verbalize_plan(run.plan))
    else:
        lines.append("NO PLAN")
    return "\n".join(lines)


_VALID_EVENT_RE = re.compile(
    r"^step (\d+) \| from (.+) \| action (.+) \| valid -> (.+) \| g=(\d+)(?: t=(\d+) f=(\d+))?$"
)
_INVALID_EVENT_RE = re.compile(
    r"^step (\d+) \| from (.+) \| action (.+) \| invalid:([\w-]+)$"
)


def parse_trace_text(text):
    """Returns the structured mirror: {"events": [...], "plan": [...] | None}."""
    lines = text.strip().splitlines()
    events = []
    plan = None
    i = 0
    while i < len(lines):
        ln = lines[i].strip()
        if ln == "PLAN:":
            plan = parse_plan_text("\n".join(lines[i:]))
            break
        if ln == "NO PLAN":
            plan = None
            break
        m = _VALID_EVENT_RE.match(ln)
        if m:
            events.append({
                "index": int(m.group(1)),
                "from": render_state(parse_state(m.group(2), i + 1)),
                "action": render_action(parse_action(m.group(3), i + 1)),
                "validity": "valid",
                "to": render_state(parse_state(m.group(4), i + 1)),
                "g": int(m.group(5)),
                "t": int(m.group(6)) if m.group(6) is not None else None,
                "f": int(m.group(7)) if m.group(7) is not None else None,
            })
        else:
            m = _INVALID_EVENT_RE.match(ln)
            if not m:
                raise ParseError("malformed trace line", i + 1, ln)
            events.append({
                "index": int(m.group(1)),
                "from": render_state(parse_state(m.group(2), i + 1)),
                "action": render_action(parse_action(m.group(3), i + 1)),
                "validity": f"invalid:{m.group(4)}",
            })
        i += 1
    else:
        raise ParseError("trace is missing its plan block", len(lines), "")
    return {"events": events, "plan": list(map(render_action, plan)) if plan is not None else None}


def trace_mirror(run):
    return parse_trace_text(verbalize_trace(run))


# ---------------------------------------------------------------- meta-plans

def verbalize_metaplan(meta_plan):
    return "\n".join(
        f"subgoal {k} | {render_state(sg.start)} -> {render_state(sg.goal)} | {sg.mode.upper()}"
        for k, sg in enumerate(meta_plan, start=1)
    )


_SUBGOAL_RE = re.compile(r"^subgoal (\d+) \| (.+) -> (.+) \| (SYS1|SYS2)$")


def parse_metaplan_text(text):
    subgoals = []
    for i, ln in enumerate(text.strip().splitlines(), start=1):
        ln = ln.strip()
        if not ln:
            continue
        m = _SUBGOAL_RE.match(ln)
        if not m:
            raise ParseError("malformed subgoal line", i, ln)
        subgoals.append({
            "from": render_state(parse_state(m.group(2), i)),
            "to": render_state(parse_state(m.group(3), i)),
            "mode": m.group(4).lower(),
        })
    if not subgoals:
        raise ParseError("meta-plan has no subgoal lines", 1, "")
    return {"subgoals": subgoals}


def metaplan_mirror(meta_plan):
    return parse_metaplan_text(verbalize_metaplan(meta_plan))


# ---------------------------------------------------------------- problems

def problem_to_json(problem):
    rec = {
        "id": problem.problem_id,
        "domain": problem.domain,
        "start": render_state(problem.start),
        "goal": render_state(problem.goal),
        "gold_plan": [render_action(a) for a in problem.gold_plan] if problem.gold_plan is not None else None,
        "optimal_length": problem.optimal_length,
        "split": problem.split,
    }
    if problem.domain == "maze":
        rec["grid"] = {
            "rows": problem.grid.rows,
            "cols": problem.grid.cols,
            "obstacles": sorted(list(map(list, problem.grid.obstacles))),
        }
    else:
        rec["blocks"] = list(problem.blocks)
    return rec


def problem_from_json(rec):
    domain = rec["domain"]
    kwargs = dict(
        domain=domain,
        start=parse_state(rec["start"]),
        goal=parse_state(rec["goal"]),
        gold_plan=tuple(parse_action(a) for a in rec["gold_plan"]) if rec.get("gold_plan") is not None else None,
        optimal_length=rec.get("optimal_length"),
        problem_id=rec.get("id", ""),
        split=rec.get("split", ""),
    )
    if domain == "maze":
        g = rec["grid"]
        kwargs["grid"] = MazeGrid(g["rows"], g["cols"], frozenset(map(tuple, g["obstacles"])))
    else:
        kwargs["blocks"] = tuple(rec["blocks"])
    return PlanningProblem(**kwargs)


def problem_input_text(problem):
    if problem.domain == "maze":
        return (f"maze {problem.grid.rows}x{problem.grid.cols}\n{render_maze(problem)}\n"
                f"start {render_state(problem.start)} goal {render_state(problem.goal)}")
    return f"blocks {render_state(problem.start)} -> {render_state(problem.goal)}"


def save_problems(path, problems_by_split):
    records = [
        problem_to_json(p)
        for split in sorted(problems_by_split)
        for p in problems_by_split[split]
    ]
    write_jsonl_atomic(path, records)


def load_problems(path):
    out = {}
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                problem = problem_from_json(json.loads(line))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ParseError(f"corrupt problem record in {path}: {exc}", i) from exc
            out.setdefault(problem.split or "all", []).append(problem)
    return out


# ---------------------------------------------------------------- emission

def write_jsonl_atomic(path, records):
    """Single-writer atomic emit: full temp file, then rename."""
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def emit_datasets(problems, controller_records, engine_config, out_dir, seed=0):
    """Write the three training corpora (fast-planner, search-trace, and
    controller records) plus a manifest with counts and hashes.

    problems: the problem list supplying fast-planner targets and search
    traces (typically the train split). controller_records comes from
    build_controller_dataset.
    """
    from .search import run_engine

    os.makedirs(out_dir, exist_ok=True)

    def record(problem, kind, target_text, structured):
        return {
            "id": problem.problem_id,
            "kind": kind,
            "template_version": TEMPLATE_VERSION,
            "input_text": problem_input_text(problem),
            "target_text": target_text,
            "structured": structured,
        }

    sys1_records = []
    sys2_records = []
    for p in problems:
        if p.gold_plan is None:
            raise ValueError(f"problem {p.problem_id!r} has no gold plan")
        plan_text = verbalize_plan(p.gold_plan)
        sys1_records.append(record(p, "sys1", plan_text,
                                   {"actions": [render_action(a) for a in p.gold_plan]}))
        run = run_engine(engine_config.sys2, p, engine_config.trace)
        sys2_records.append(record(p, "sys2", verbalize_trace(run), trace_mirror(run)))

    controller_out = []
    for p, meta in controller_records:
        controller_out.append(record(p, "controller", verbalize_metaplan(meta),
                                     metaplan_mirror(meta)))

    paths = {
        "sys1": os.path.join(out_dir, "sys1.jsonl"),
        "sys2": os.path.join(out_dir, "sys2.jsonl"),
        "controller": os.path.join(out_dir, "controller.jsonl"),
    }
    write_jsonl_atomic(paths["sys1"], sys1_records)
    write_jsonl_atomic(paths["sys2"], sys2_records)
    write_jsonl_atomic(paths["controller"], controller_out)

    config_text = json.dumps({
        "engine": engine_config.sys2,
        "valid_cap": engine_config.trace.valid_cap,
        "invalid_cap": engine_config.trace.invalid_cap,
        "trace_seed": engine_config.trace.seed,
        "seed": seed,
    }, sort_keys=True)
    manifest = {
        "template_version": TEMPLATE_VERSION,
        "seed": seed,
        "config_hash": hashlib.sha256(config_text.encode()).hexdigest(),
        "files": {
            kind: {"path": os.path.basename(path),
                   "count": count,
                   "sha256": _sha256(path)}
            for (kind, path), count in zip(
                paths.items(),
                (len(sys1_records), len(sys2_records), len(controller_out)))
        },
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    tmp = manifest_path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, manifest_path)
    return manifest
