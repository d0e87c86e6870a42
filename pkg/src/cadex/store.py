"""Durable store: snapshot + append-only audit log + tar backups.

Layout (one directory per store): `snapshot.json` (current state,
human-inspectable), `audit.log` (JSON Lines, one event per line,
fsync-on-append; the source of truth), `lock` (single-writer guard).

Every mutation appends exactly one audit event and the in-memory state
is produced only by applying events, so replaying the log from empty
always reproduces the snapshot. On open, a truncated final line (crash
mid-append) is discarded and the store recovers to the last completed
event.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import tarfile
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path

from .assessment import ComponentId, MarkSheet, parse_mark
from .promotion import CoachNote, Rank

EVENT_KINDS = ("cadet-created", "marks-submitted", "evaluated", "note-added", "rank-updated")


class StoreError(Exception):
    pass


class NotFoundError(StoreError):
    pass


class DuplicateError(StoreError):
    pass


class StoreLockedError(StoreError):
    pass


class CorruptBackupError(StoreError):
    pass


@dataclass(frozen=True)
class CadetRecord:
    cadet_id: str
    name: str
    rank: Rank
    enrollment_cycle: str


def now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.") + (
        f"{datetime.now(timezone.utc).microsecond // 1000:03d}Z"
    )


def _sheet_to_payload(sheet: MarkSheet) -> dict:
    return {
        "cadet_id": sheet.cadet_id,
        "cycle": sheet.cycle,
        "marks": {c.value: str(sheet.marks[c]) for c in ComponentId},
    }


def _sheet_from_payload(payload: dict) -> MarkSheet:
    return MarkSheet(
        cadet_id=payload["cadet_id"],
        cycle=payload["cycle"],
        marks={ComponentId(k): parse_mark(v) for k, v in payload["marks"].items()},
    )


class Store:
    """Single-writer persistent store for cadets, marks, notes, traces."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._log_fd: io.BufferedWriter | None = None
        self._locked = False
        self.seq = 0
        self.cadets: dict[str, CadetRecord] = {}
        self.sheets: dict[tuple[str, str], list[MarkSheet]] = {}
        self.traces: dict[str, dict] = {}
        self.notes: dict[str, list[CoachNote]] = {}

    # -- lifecycle --------------------------------------------------------

    @classmethod
    def open(cls, path: str | Path) -> "Store":
        store = cls(Path(path))
        store.path.mkdir(parents=True, exist_ok=True)
        store._acquire_lock()
        try:
            store._replay_log()
            store._write_snapshot()
        except BaseException:
            store.close()
            raise
        store._log_fd = (store.path / "audit.log").open("ab")
        return store

    def close(self) -> None:
        if self._log_fd is not None:
            self._log_fd.close()
            self._log_fd = None
        if self._locked:
            (self.path / "lock").unlink(missing_ok=True)
            self._locked = False

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _acquire_lock(self) -> None:
        lock_path = self.path / "lock"
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StoreLockedError(f"store {self.path} is locked by another process") from None
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        self._locked = True

    def _replay_log(self) -> None:
        log_path = self.path / "audit.log"
        if not log_path.exists():
            return
        raw = log_path.read_bytes()
        good = 0
        while good < len(raw):
            newline = raw.find(b"\n", good)
            if newline == -1:
                break  # torn tail write without terminator
            try:
                event = json.loads(raw[good:newline].decode("utf-8"))
                self._apply(event)
            except (ValueError, KeyError):
                break  # torn or corrupt line; recover to last completed event
            good = newline + 1
        if good < len(raw):
            with log_path.open("r+b") as fh:
                fh.truncate(good)
                fh.flush()
                os.fsync(fh.fileno())

    # -- event plumbing ---------------------------------------------------

    def _apply(self, event: dict) -> None:
        kind = event["kind"]
        payload = event["payload"]
        if kind == "cadet-created":
            record = CadetRecord(
                cadet_id=payload["cadet_id"],
                name=payload["name"],
                rank=Rank(payload["rank"]),
                enrollment_cycle=payload["enrollment_cycle"],
            )
            self.cadets[record.cadet_id] = record
        elif kind == "rank-updated":
            old = self.cadets[payload["cadet_id"]]
            self.cadets[payload["cadet_id"]] = CadetRecord(
                old.cadet_id, payload.get("name", old.name), Rank(payload["rank"]), old.enrollment_cycle
            )
        elif kind == "marks-submitted":
            sheet = _sheet_from_payload(payload)
            self.sheets.setdefault((sheet.cadet_id, sheet.cycle), []).append(sheet)
        elif kind == "evaluated":
            self.traces[payload["trace"]["trace_id"]] = payload["trace"]
        elif kind == "note-added":
            note = CoachNote(
                cadet_id=payload["cadet_id"],
                cycle=payload["cycle"],
                author=payload["author"],
                text=payload["text"],
                timestamp=payload["timestamp"],
            )
            self.notes.setdefault(note.cadet_id, []).append(note)
        else:
            raise StoreError(f"unknown audit event kind {kind!r}")
        self.seq = event["seq"]

    def _append(self, kind: str, payload: dict) -> dict:
        assert self._log_fd is not None, "store not open"
        event = {"seq": self.seq + 1, "ts": now_iso(), "kind": kind, "payload": payload}
        self._apply(event)
        line = json.dumps(event, separators=(",", ":")) + "\n"
        self._log_fd.write(line.encode("utf-8"))
        self._log_fd.flush()
        os.fsync(self._log_fd.fileno())
        self._write_snapshot()
        return event

    def _write_snapshot(self) -> None:
        snapshot = self.snapshot()
        tmp = self.path / "snapshot.json.tmp"
        with tmp.open("w", encoding="utf-8") as fh:
            json.dump(snapshot, fh, indent=2, sort_keys=True)
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())
        tmp.rename(self.path / "snapshot.json")

    def snapshot(self) -> dict:
        return {
            "seq": self.seq,
            "cadets": {
                cid: {
                    "cadet_id": r.cadet_id,
                    "name": r.name,
                    "rank": r.rank.value,
                    "enrollment_cycle": r.enrollment_cycle,
                }
                for cid, r in sorted(self.cadets.items())
            },
            "sheets": {
                f"{cid}/{cycle}": [_sheet_to_payload(s) for s in versions]
                for (cid, cycle), versions in sorted(self.sheets.items())
            },
            "traces": dict(sorted(self.traces.items())),
            "notes": {
                cid: [vars(n) for n in ns] for cid, ns in sorted(self.notes.items())
            },
        }

    # -- mutations --------------------------------------------------------

    def put_cadet(self, record: CadetRecord, update: bool = False) -> None:
        if not update and record.cadet_id in self.cadets:
            raise DuplicateError(f"cadet {record.cadet_id!r} already exists")
        if update:
            if record.cadet_id not in self.cadets:
                raise NotFoundError(f"no cadet {record.cadet_id!r}")
            self._append(
                "rank-updated",
                {"cadet_id": record.cadet_id, "name": record.name, "rank": record.rank.value},
            )
        else:
            self._append(
                "cadet-created",
                {
                    "cadet_id": record.cadet_id,
                    "name": record.name,
                    "rank": record.rank.value,
                    "enrollment_cycle": record.enrollment_cycle,
                },
            )

    def submit_marks(self, cadet_id: str, sheet: MarkSheet, resubmit: bool = False) -> str:
        if cadet_id not in self.cadets:
            raise NotFoundError(f"no cadet {cadet_id!r}")
        if sheet.cadet_id != cadet_id:
            raise StoreError("sheet cadet_id does not match")
        sheet.validate()
        key = (cadet_id, sheet.cycle)
        if key in self.sheets and not resubmit:
            raise DuplicateError(
                f"marks for {cadet_id!r} cycle {sheet.cycle!r} already submitted "
                "(pass resubmit to supersede)"
            )
        self._append("marks-submitted", _sheet_to_payload(sheet))
        return f"{cadet_id}/{sheet.cycle}/{len(self.sheets[key])}"

    def record_trace(self, trace_json: dict) -> None:
        existing = self.traces.get(trace_json["trace_id"])
        if existing is not None:
            if existing == trace_json:
                return  # idempotent re-evaluation; traces are immutable
            raise DuplicateError(
                f"trace {trace_json['trace_id']!r} already recorded with different content"
            )
        self._append("evaluated", {"trace": trace_json})

    def add_note(self, note: CoachNote) -> None:
        if note.cadet_id not in self.cadets:
            raise NotFoundError(f"no cadet {note.cadet_id!r}")
        existing = [n for n in self.notes.get(note.cadet_id, []) if n.author == note.author]
        if existing and note.timestamp < existing[-1].timestamp:
            raise StoreError("note timestamp older than the author's previous note")
        self._append("note-added", vars(note))

    # -- reads ------------------------------------------------------------

    def get_cadet(self, cadet_id: str) -> CadetRecord:
        try:
            return self.cadets[cadet_id]
        except KeyError:
            raise NotFoundError(f"no cadet {cadet_id!r}") from None

    def list_cadets(self) -> list[CadetRecord]:
        return [self.cadets[cid] for cid in sorted(self.cadets)]

    def latest_sheet(self, cadet_id: str, cycle: str) -> MarkSheet:
        versions = self.sheets.get((cadet_id, cycle))
        if not versions:
            raise NotFoundError(f"no marks for {cadet_id!r} in cycle {cycle!r}")
        return versions[-1]

    def cycles(self) -> list[str]:
        return sorted({cycle for _, cycle in self.sheets})

    def sheets_for_cycle(self, cycle: str) -> list[MarkSheet]:
        return [
            versions[-1]
            for (cid, cyc), versions in sorted(self.sheets.items())
            if cyc == cycle
        ]

    def get_trace(self, trace_id: str) -> dict:
        try:
            return self.traces[trace_id]
        except KeyError:
            raise NotFoundError(f"no trace {trace_id!r}") from None

    def list_notes(self, cadet_id: str) -> list[CoachNote]:
        return list(self.notes.get(cadet_id, ()))

    # -- backup -----------------------------------------------------------

    def export_backup(self, destination: str | Path) -> Path:
        """Write `backup-<timestamp>.tar` (snapshot + log + MANIFEST)."""
        destination = Path(destination)
        destination.mkdir(parents=True, exist_ok=True)
        stamp = now_iso().replace(":", "").replace(".", "")
        archive = destination / f"backup-{stamp}.tar"
        snapshot_bytes = (self.path / "snapshot.json").read_bytes()
        log_path = self.path / "audit.log"
        log_bytes = log_path.read_bytes() if log_path.exists() else b""
        manifest = "".join(
            f"{hashlib.sha256(data).hexdigest()}  {name}\n"
            for name, data in (("snapshot.json", snapshot_bytes), ("audit.log", log_bytes))
        ).encode("utf-8")
        tmp = archive.with_suffix(".tar.partial")
        with tarfile.open(tmp, "w") as tar:
            for name, data in (
                ("snapshot.json", snapshot_bytes),
                ("audit.log", log_bytes),
                ("MANIFEST", manifest),
            ):
                info = tarfile.TarInfo(name)
                info.size = len(data)
                tar.addfile(info, io.BytesIO(data))
        with tmp.open("rb") as fh:
            os.fsync(fh.fileno())
        _verify_archive_members(tmp)
        tmp.rename(archive)
        return archive


def _verify_archive_members(archive: Path) -> dict[str, bytes]:
    try:
        with tarfile.open(archive, "r") as tar:
            members = {m.name: tar.extractfile(m).read() for m in tar.getmembers()}
    except tarfile.TarError as exc:
        raise CorruptBackupError(f"unreadable backup archive: {exc}") from None
    if "MANIFEST" not in members:
        raise CorruptBackupError("backup archive has no MANIFEST")
    for line in members["MANIFEST"].decode("utf-8").splitlines():
        digest, name = line.split("  ", 1)
        if name not in members:
            raise CorruptBackupError(f"backup member {name!r} missing")
        if hashlib.sha256(members[name]).hexdigest() != digest:
            raise CorruptBackupError(f"checksum mismatch for {name!r}")
    return members


def import_backup(archive: str | Path, target: str | Path) -> Path:
    """Restore a backup archive into a fresh store directory.

    Verification happens before anything is written, so a corrupt
    archive leaves no partial state behind.
    """
    target = Path(target)
    members = _verify_archive_members(Path(archive))
    if target.exists() and any(target.iterdir()):
        raise StoreError(f"target directory {target} is not empty")
    staging = Path(tempfile.mkdtemp(prefix="cadex-restore-", dir=target.parent if target.parent.exists() else None))
    (staging / "snapshot.json").write_bytes(members["snapshot.json"])
    (staging / "audit.log").write_bytes(members["audit.log"])
    target.mkdir(parents=True, exist_ok=True)
    (staging / "snapshot.json").rename(target / "snapshot.json")
    (staging / "audit.log").rename(target / "audit.log")
    staging.rmdir()
    return target
