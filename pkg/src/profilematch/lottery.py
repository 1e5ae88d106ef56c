"""School-choice lottery pipeline: data model, algorithms, reports, synthesis.

Students apply to three schools; schools hold separate seat quotas per sex,
and schools outside a student's list count as fourth choices. Three
assignment procedures are provided:

* ``baseline_greedy``: a two-stage greedy. Stage one hands out 80% of each
  school's seats by preference in a seeded random student order; stage two
  ranks each remaining student's eligible schools by walking distance and
  fills the remaining seats greedily.
* ``run_rm``: rank-maximal assignment through the weighted reduction with the
  ladder w(e) = 2**(4 - rank + 1) - 1.
* ``run_mcrm``: rank-maximal assignment with minimum total commuting distance
  among all rank-maximal assignments, solved as a five-function profile
  problem (rank indicators plus D - d(e)).

Distances are carried end to end as integer hundredths of a kilometre and
only rendered as km at the edges.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .core import Instance, Profile, complete_and_balance
from .errors import (
    ConfigError,
    InfeasibleAssignmentError,
    MixedInstancesError,
    ParseError,
    ValidationError,
)
from .reduction import ReduceResult, solve_instance, solve_instance_with
from .weights import RankSystem, mcrm_weights, rm_weights

SEXES = ("male", "female")
CHOICE_COUNT = 3
RANK_LEVELS = 4  # three listed choices plus the implicit fourth choice

# Nine schools with sex-specific quotas: 715 male and 699 female seats.
DEFAULT_QUOTAS: tuple[tuple[str, int, int], ...] = (
    ("h1", 154, 0),
    ("h2", 161, 0),
    ("h3", 172, 0),
    ("h4", 0, 186),
    ("h5", 0, 170),
    ("h6", 0, 172),
    ("h7", 80, 73),
    ("h8", 77, 46),
    ("h9", 71, 52),
)


@dataclass(frozen=True)
class School:
    id: str
    male_quota: int
    female_quota: int

    def quota(self, sex: str) -> int:
        return self.male_quota if sex == "male" else self.female_quota


@dataclass(frozen=True)
class Student:
    id: str
    sex: str
    choices: tuple[str, str, str]
    distances: dict[str, int]  # school id -> distance in 0.01 km units


class LotteryInstance:
    """Validated schools + students with derived rank and distance lookups."""

    def __init__(self, schools: Sequence[School], students: Sequence[Student]):
        ids = [s.id for s in schools]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate school ids")
        for s in schools:
            if s.male_quota < 0 or s.female_quota < 0:
                raise ValidationError(f"school {s.id}: negative quota")
        by_id = {s.id: s for s in schools}
        eligible = {
            sex: tuple(s.id for s in schools if s.quota(sex) > 0) for sex in SEXES
        }

        seen = set()
        for st in students:
            if st.id in seen:
                raise ValidationError(f"duplicate student id {st.id}")
            seen.add(st.id)
            if st.sex not in SEXES:
                raise ValidationError(f"student {st.id}: unknown sex {st.sex!r}")
            if len(st.choices) != CHOICE_COUNT or len(set(st.choices)) != CHOICE_COUNT:
                raise ValidationError(
                    f"student {st.id}: needs {CHOICE_COUNT} distinct choices"
                )
            for cid in st.choices:
                if cid not in by_id:
                    raise ValidationError(
                        f"student {st.id}: unknown school {cid} in choices"
                    )
                if by_id[cid].quota(st.sex) == 0:
                    raise ValidationError(
                        f"student {st.id}: school {cid} has no {st.sex} seats"
                    )
            for sid in eligible[st.sex]:
                d = st.distances.get(sid)
                if d is None:
                    raise ValidationError(
                        f"student {st.id}: missing distance to eligible school {sid}"
                    )
                if int(d) < 0:
                    raise ValidationError(
                        f"student {st.id}: negative distance to {sid}"
                    )

        self.schools = tuple(schools)
        self.students = tuple(students)
        self._by_id = by_id
        self._eligible = eligible

        d_max = 0
        for st in students:
            for sid in eligible[st.sex]:
                d_max = max(d_max, int(st.distances[sid]))
        self.max_distance = d_max
        self.instance_key = self._fingerprint()

    def _fingerprint(self) -> str:
        h = hashlib.sha256()
        for s in self.schools:
            h.update(f"S|{s.id}|{s.male_quota}|{s.female_quota}\n".encode())
        for st in self.students:
            dists = ",".join(
                f"{sid}:{st.distances[sid]}" for sid in self.eligible_ids(st.sex)
            )
            h.update(
                f"T|{st.id}|{st.sex}|{','.join(st.choices)}|{dists}\n".encode()
            )
        return h.hexdigest()[:16]

    def school(self, sid: str) -> School:
        return self._by_id[sid]

    def eligible_ids(self, sex: str) -> tuple[str, ...]:
        return self._eligible[sex]

    def rank_of(self, student: Student, sid: str) -> int:
        try:
            return student.choices.index(sid) + 1
        except ValueError:
            return RANK_LEVELS

    def distance(self, student: Student, sid: str) -> int:
        return int(student.distances[sid])

    def total_seats(self, sex: str | None = None) -> int:
        if sex is None:
            return sum(s.male_quota + s.female_quota for s in self.schools)
        return sum(s.quota(sex) for s in self.schools)


# ---------------------------------------------------------------------------
# Seat expansion
# ---------------------------------------------------------------------------


def expand_seats(
    inst: LotteryInstance,
) -> tuple[Instance, RankSystem, tuple[str, ...]]:
    """Clone each school into quota-many seats and connect eligible students.

    Returns the bipartite instance with rank-indicator utilities (A side =
    students in input order, B side = seats), the per-edge rank system with
    distances, and the school id of every seat.
    """
    seat_school_pos: list[int] = []
    seat_sex: list[str] = []
    for k, school in enumerate(inst.schools):
        seat_school_pos.extend([k] * school.male_quota)
        seat_sex.extend(["male"] * school.male_quota)
        seat_school_pos.extend([k] * school.female_quota)
        seat_sex.extend(["female"] * school.female_quota)
    seat_school_pos_arr = np.asarray(seat_school_pos, dtype=np.int64)
    seats_by_sex = {
        sex: np.nonzero(np.asarray([x == sex for x in seat_sex]))[0].astype(np.int64)
        for sex in SEXES
    }
    n_schools = len(inst.schools)
    school_pos = {s.id: k for k, s in enumerate(inst.schools)}

    edge_chunks: list[np.ndarray] = []
    rank_chunks: list[np.ndarray] = []
    dist_chunks: list[np.ndarray] = []
    for a, st in enumerate(inst.students):
        seat_idx = seats_by_sex[st.sex]
        if seat_idx.size == 0:
            continue
        rank_by_school = np.full(n_schools, RANK_LEVELS, dtype=np.int64)
        for c, cid in enumerate(st.choices):
            rank_by_school[school_pos[cid]] = c + 1
        dist_by_school = np.zeros(n_schools, dtype=np.int64)
        for sid in inst.eligible_ids(st.sex):
            dist_by_school[school_pos[sid]] = inst.distance(st, sid)
        schools_of_seats = seat_school_pos_arr[seat_idx]
        chunk = np.empty((seat_idx.size, 2), dtype=np.int64)
        chunk[:, 0] = a
        chunk[:, 1] = seat_idx
        edge_chunks.append(chunk)
        rank_chunks.append(rank_by_school[schools_of_seats])
        dist_chunks.append(dist_by_school[schools_of_seats])

    if edge_chunks:
        edges = np.concatenate(edge_chunks)
        ranks = np.concatenate(rank_chunks)
        dists = np.concatenate(dist_chunks)
    else:
        edges = np.zeros((0, 2), dtype=np.int64)
        ranks = np.zeros(0, dtype=np.int64)
        dists = np.zeros(0, dtype=np.int64)

    utilities = np.zeros((edges.shape[0], RANK_LEVELS), dtype=np.int64)
    if edges.shape[0]:
        utilities[np.arange(edges.shape[0]), ranks - 1] = 1
    instance = Instance(
        len(inst.students), len(seat_school_pos), (1,) * RANK_LEVELS, edges, utilities
    )
    rank_system = RankSystem(
        edges, ranks, RANK_LEVELS, distances=dists, max_distance=inst.max_distance
    )
    seat_schools = tuple(inst.schools[k].id for k in seat_school_pos)
    return instance, rank_system, seat_schools


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def render_km(units: int) -> str:
    """Integer hundredths of a km rendered exactly with two decimals."""
    units = int(units)
    sign = "-" if units < 0 else ""
    units = abs(units)
    return f"{sign}{units // 100}.{units % 100:02d}"


@dataclass(frozen=True)
class AssignmentReport:
    """Outcome of one assignment run over a lottery instance."""

    algo: str
    seed: int | None
    choice_counts: tuple[int, int, int, int]  # 1st, 2nd, 3rd, others
    total_units: int
    assignments: tuple[tuple[str, str], ...]  # (student id, school id)
    unassigned: tuple[str, ...]
    instance_key: str

    @property
    def total_km(self) -> str:
        return render_km(self.total_units)

    @property
    def profile(self) -> Profile:
        return Profile(tuple(self.choice_counts))

    def to_json_obj(self) -> dict:
        return {
            "algo": self.algo,
            "seed": self.seed,
            "choice_counts": list(self.choice_counts),
            "total_km": self.total_km,
            "assignments": [
                {"student": s, "school": h} for s, h in self.assignments
            ],
            "unassigned": list(self.unassigned),
        }


def _build_report(
    inst: LotteryInstance,
    algo: str,
    seed: int | None,
    placed: Mapping[str, str],
) -> AssignmentReport:
    counts = [0, 0, 0, 0]
    total = 0
    students_by_id = {st.id: st for st in inst.students}
    for sid_student, sid_school in placed.items():
        st = students_by_id[sid_student]
        counts[inst.rank_of(st, sid_school) - 1] += 1
        total += inst.distance(st, sid_school)
    unassigned = tuple(st.id for st in inst.students if st.id not in placed)
    report = AssignmentReport(
        algo=algo,
        seed=seed,
        choice_counts=tuple(counts),
        total_units=total,
        assignments=tuple(sorted(placed.items())),
        unassigned=unassigned,
        instance_key=inst.instance_key,
    )
    validate_report(inst, report)
    return report


def validate_report(inst: LotteryInstance, report: AssignmentReport) -> None:
    """Enforce capacity, sex segregation and count consistency."""
    students_by_id = {st.id: st for st in inst.students}
    fill: dict[tuple[str, str], int] = {}
    counts = [0, 0, 0, 0]
    total = 0
    for sid_student, sid_school in report.assignments:
        st = students_by_id.get(sid_student)
        if st is None:
            raise ValidationError(f"report assigns unknown student {sid_student}")
        school = inst.school(sid_school)
        if school.quota(st.sex) == 0:
            raise ValidationError(
                f"student {sid_student} assigned to {sid_school}, which has "
                f"no {st.sex} seats"
            )
        key = (sid_school, st.sex)
        fill[key] = fill.get(key, 0) + 1
        if fill[key] > school.quota(st.sex):
            raise ValidationError(
                f"school {sid_school} exceeds its {st.sex} quota"
            )
        counts[inst.rank_of(st, sid_school) - 1] += 1
        total += inst.distance(st, sid_school)
    if tuple(counts) != report.choice_counts:
        raise ValidationError("choice counts do not match the assignments")
    if sum(counts) != len(report.assignments):
        raise ValidationError("choice counts do not sum to assigned students")
    if total != report.total_units:
        raise ValidationError("distance total does not match the assignments")


def report(
    reports: Sequence[AssignmentReport], out_dir: str | Path | None = None
) -> tuple[dict, str]:
    """Merge runs into a JSON document and a CSV table; optionally write both."""
    if not reports:
        raise MixedInstancesError("no reports to merge")
    keys = {r.instance_key for r in reports}
    if len(keys) != 1:
        raise MixedInstancesError(
            f"reports come from {len(keys)} different instances"
        )
    doc = {"instance": reports[0].instance_key,
           "reports": [r.to_json_obj() for r in reports]}
    lines = ["algo,seed,choice1,choice2,choice3,others,total_km"]
    for r in reports:
        c1, c2, c3, c4 = r.choice_counts
        seed = "" if r.seed is None else str(r.seed)
        lines.append(f"{r.algo},{seed},{c1},{c2},{c3},{c4},{r.total_km}")
    csv_text = "\n".join(lines) + "\n"
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(doc, indent=2) + "\n")
        (out / "report.csv").write_text(csv_text)
    return doc, csv_text


# ---------------------------------------------------------------------------
# Algorithms
# ---------------------------------------------------------------------------


def baseline_greedy(inst: LotteryInstance, seed: int) -> AssignmentReport:
    """Two-stage greedy: 80% of seats by preference, the rest by distance.

    Stage one capacity per school and sex is floor(0.8 * quota); students are
    visited in a seeded random order and take their best-ranked listed choice
    with a free stage-one seat. Stage two recomputes remaining capacity as
    quota minus the stage-one fill, ranks each leftover student's eligible
    schools by ascending distance (ties by school id) and assigns greedily in
    a fresh seeded order.
    """
    rng = random.Random(seed)
    order = list(inst.students)
    rng.shuffle(order)

    stage1_cap = {
        (s.id, sex): (8 * s.quota(sex)) // 10 for s in inst.schools for sex in SEXES
    }
    fill: dict[tuple[str, str], int] = {
        (s.id, sex): 0 for s in inst.schools for sex in SEXES
    }
    placed: dict[str, str] = {}
    for st in order:
        for cid in st.choices:
            key = (cid, st.sex)
            if stage1_cap[key] > 0:
                stage1_cap[key] -= 1
                fill[key] += 1
                placed[st.id] = cid
                break

    remaining = [st for st in order if st.id not in placed]
    rng.shuffle(remaining)
    stage2_cap = {
        (s.id, sex): s.quota(sex) - fill[(s.id, sex)]
        for s in inst.schools
        for sex in SEXES
    }
    leftovers: list[Student] = []
    for st in remaining:
        by_distance = sorted(
            inst.eligible_ids(st.sex), key=lambda sid: (inst.distance(st, sid), sid)
        )
        for sid in by_distance:
            key = (sid, st.sex)
            if stage2_cap[key] > 0:
                stage2_cap[key] -= 1
                placed[st.id] = sid
                break
        else:
            leftovers.append(st)

    for st in leftovers:
        open_seats = sum(
            stage2_cap[(s.id, st.sex)] for s in inst.schools
        )
        if open_seats > 0:
            raise InfeasibleAssignmentError(
                f"student {st.id} unplaced although {open_seats} {st.sex} "
                "seats remain"
            )
    return _build_report(inst, "baseline", seed, placed)


def _matching_to_placement(
    inst: LotteryInstance, result: ReduceResult, seat_schools: tuple[str, ...]
) -> dict[str, str]:
    placed: dict[str, str] = {}
    for a, b in result.matching.pairs:
        placed[inst.students[a].id] = seat_schools[b]
    return placed


def run_rm(inst: LotteryInstance) -> AssignmentReport:
    """Rank-maximal assignment via the weighted reduction.

    Uses the ladder w(e) = 2**(4 - rank(e) + 1) - 1 over rank-indicator
    utilities. Consecutive ladder ratios exceed 2, which makes the dominance
    condition hold for indicator utilities, so the (quartic) triple scan is
    skipped; the lexicographic refinement inside the maximum-weight face
    guarantees the returned profile is the rank-maximal one.
    """
    expanded, ranks, seat_schools = expand_seats(inst)
    completed = complete_and_balance(expanded)
    assignment = rm_weights(completed, ranks, RANK_LEVELS)
    result = solve_instance_with(
        expanded, assignment, check="skip", completed=completed
    )
    placed = _matching_to_placement(inst, result, seat_schools)
    return _build_report(inst, "rm", None, placed)


def run_mcrm(inst: LotteryInstance, paper_formula: bool = False) -> AssignmentReport:
    """Minimum-distance rank-maximal assignment.

    The default path appends a fifth utility function D - d(e) to the rank
    indicators and solves the five-function profile problem exactly: the
    result is rank-maximal, and among all rank-maximal assignments it has the
    minimum total commuting distance. With ``paper_formula`` the closed form
    (D+1)*2**(4-rank) - D - d(e) is used as an explicit weight assignment
    instead, with the dominance condition enforced before solving.
    """
    expanded, ranks, seat_schools = expand_seats(inst)
    if paper_formula:
        completed = complete_and_balance(expanded)
        assignment = mcrm_weights(completed, ranks, RANK_LEVELS)
        result = solve_instance_with(
            expanded, assignment, check="auto", completed=completed
        )
    else:
        d_max = inst.max_distance
        utilities5 = np.concatenate(
            [
                expanded.utilities,
                (d_max - np.asarray(ranks.distances, dtype=np.int64))[:, None],
            ],
            axis=1,
        )
        inst5 = Instance(
            expanded.a_count,
            expanded.b_count,
            (1,) * RANK_LEVELS + (d_max,),
            expanded.edges,
            utilities5,
        )
        result = solve_instance(inst5)
    placed = _matching_to_placement(inst, result, seat_schools)
    return _build_report(inst, "mcrm", None, placed)


# ---------------------------------------------------------------------------
# Synthetic data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SynthConfig:
    """Synthetic lottery generator settings.

    Schools and students are points in a square of ``side_units`` hundredths
    of a km; distances are rounded Euclidean lengths. Each student picks
    three distinct eligible schools: with probability ``distance_bias`` the
    picks are weighted toward nearby schools, otherwise uniform.
    """

    quotas: tuple[tuple[str, int, int], ...] = DEFAULT_QUOTAS
    male_students: int = 715
    female_students: int = 699
    side_units: int = 1000
    distance_bias: float = 0.95


def _weighted_sample_without_replacement(
    rng: random.Random, items: Sequence[str], weights: Sequence[float], k: int
) -> list[str]:
    pool = list(items)
    w = [float(x) for x in weights]
    out: list[str] = []
    for _ in range(k):
        total = sum(w)
        x = rng.random() * total
        acc = 0.0
        pick = len(pool) - 1
        for idx, wi in enumerate(w):
            acc += wi
            if x < acc:
                pick = idx
                break
        out.append(pool.pop(pick))
        w.pop(pick)
    return out


def synth_generate(
    config: SynthConfig, seed: int, out_dir: str | Path
) -> tuple[Path, Path]:
    """Write students.csv and schools.csv; deterministic for a fixed seed."""
    if config.male_students < 0 or config.female_students < 0:
        raise ConfigError("student counts must be non-negative")
    if config.side_units <= 0:
        raise ConfigError("the square side must be positive")
    if not 0.0 <= config.distance_bias <= 1.0:
        raise ConfigError("distance_bias must lie in [0, 1]")
    schools = [School(sid, mq, fq) for sid, mq, fq in config.quotas]
    ids = [s.id for s in schools]
    if len(set(ids)) != len(ids):
        raise ConfigError("duplicate school ids in quotas")
    for sex, count in (("male", config.male_students), ("female", config.female_students)):
        eligible = [s for s in schools if s.quota(sex) > 0]
        if count > 0 and len(eligible) < CHOICE_COUNT:
            raise ConfigError(
                f"need at least {CHOICE_COUNT} schools with {sex} seats"
            )

    rng = random.Random(seed)
    side = float(config.side_units)
    school_pos = {s.id: (rng.uniform(0, side), rng.uniform(0, side)) for s in schools}

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    schools_path = out / "schools.csv"
    students_path = out / "students.csv"

    with open(schools_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["school_id", "male_quota", "female_quota"])
        for s in schools:
            writer.writerow([s.id, s.male_quota, s.female_quota])

    with open(students_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["student_id", "sex", "choice1", "choice2", "choice3"]
            + [f"dist_{sid}" for sid in ids]
        )
        specs = [("m", "male", config.male_students), ("f", "female", config.female_students)]
        for prefix, sex, count in specs:
            eligible = [s.id for s in schools if s.quota(sex) > 0]
            for i in range(1, count + 1):
                x, y = rng.uniform(0, side), rng.uniform(0, side)
                dist = {
                    sid: int(round(math.hypot(x - school_pos[sid][0],
                                              y - school_pos[sid][1])))
                    for sid in eligible
                }
                if rng.random() < config.distance_bias:
                    weights = [1.0 / (dist[sid] + 25.0) ** 2 for sid in eligible]
                    choices = _weighted_sample_without_replacement(
                        rng, eligible, weights, CHOICE_COUNT
                    )
                else:
                    choices = rng.sample(eligible, CHOICE_COUNT)
                row = [f"{prefix}{i:04d}", sex] + choices
                row += [str(dist[sid]) if sid in dist else "" for sid in ids]
                writer.writerow(row)

    return students_path, schools_path


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------


def _read_schools(path: str | Path) -> list[School]:
    schools: list[School] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty schools file") from None
        if [h.strip() for h in header] != ["school_id", "male_quota", "female_quota"]:
            raise ParseError(
                "schools header must be school_id,male_quota,female_quota", 1
            )
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError("expected 3 columns", reader.line_num)
            sid = row[0].strip()
            try:
                mq, fq = int(row[1]), int(row[2])
            except ValueError:
                raise ParseError("quotas must be integers", reader.line_num) from None
            schools.append(School(sid, mq, fq))
    return schools


def _read_students(path: str | Path, schools: Sequence[School]) -> list[Student]:
    ids = [s.id for s in schools]
    expected = ["student_id", "sex", "choice1", "choice2", "choice3"] + [
        f"dist_{sid}" for sid in ids
    ]
    students: list[Student] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty students file") from None
        if [h.strip() for h in header] != expected:
            raise ParseError(
                f"students header must be {','.join(expected)}", 1
            )
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected):
                raise ParseError(
                    f"expected {len(expected)} columns", reader.line_num
                )
            sid = row[0].strip()
            sex = row[1].strip()
            choices = (row[2].strip(), row[3].strip(), row[4].strip())
            distances: dict[str, int] = {}
            for k, school_id in enumerate(ids):
                cell = row[5 + k].strip()
                if not cell:
                    continue
                try:
                    distances[school_id] = int(cell)
                except ValueError:
                    raise ParseError(
                        f"distance to {school_id} must be an integer",
                        reader.line_num,
                    ) from None
            students.append(Student(sid, sex, choices, distances))
    return students


def load(students_path: str | Path, schools_path: str | Path) -> LotteryInstance:
    """Read and validate the two CSV files into a LotteryInstance."""
    schools = _read_schools(schools_path)
    students = _read_students(students_path, schools)
    return LotteryInstance(schools, students)
