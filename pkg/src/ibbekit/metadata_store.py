"""Versioned blob store for group metadata, with long-poll change watching.

Two interchangeable backends: an in-memory dict and an on-disk directory
tree whose layout mirrors the record paths (``<group>/<name>``).  Both keep
a monotonically increasing per-group version; every put or delete bumps it
and stamps the touched record, so a client can ask "what changed since
version v" and block until the answer is non-empty.

Watching is cooperative within one process (a ``threading.Condition`` per
store).  The directory backend additionally persists versions in a small
index file per group, written atomically, so a fresh store instance over
the same root sees the same state.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
import threading
import time

from .errors import InvalidInputError

_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


def split_path(path):
    parts = path.split("/")
    if len(parts) != 2 or not all(_NAME_RE.match(p) for p in parts):
        raise InvalidInputError(f"store path must be <group>/<name>: {path!r}")
    return parts[0], parts[1]


class _StoreBase:
    """Shared version bookkeeping and long polling."""

    def __init__(self):
        self._cond = threading.Condition()

    # subclasses implement, holding self._cond:
    #   _group_version(group_id) -> int
    #   _surviving_changes(group_id, version) -> sorted paths with v > version

    def group_version(self, group_id) -> int:
        with self._cond:
            return self._group_version(group_id)

    def changed_since(self, group_id, version):
        with self._cond:
            return self._changed_locked(group_id, version)

    def _changed_locked(self, group_id, version):
        changed = self._surviving_changes(group_id, version)
        if not changed and self._group_version(group_id) > version:
            # only deletions happened; point pollers at the directory record
            return [group_id + "/group.meta"]
        return changed

    def watch(self, group_id, since_version, timeout=None):
        """Block until the group moves past since_version; list changed paths.

        Returns [] on timeout.  Deletions surface as the group record path
        so pollers re-sync from the partition directory.
        """
        with self._cond:
            deadline = None if timeout is None else time.monotonic() + timeout
            while self._group_version(group_id) <= since_version:
                if deadline is None:
                    self._cond.wait()
                else:
                    remaining = deadline - time.monotonic()
                    if remaining <= 0:
                        return []
                    self._cond.wait(remaining)
            return self._changed_locked(group_id, since_version)


class MemoryStore(_StoreBase):
    """Reference backend: everything in dicts."""

    def __init__(self):
        super().__init__()
        self._records = {}  # path -> (payload bytes, version)
        self._versions = {}  # group_id -> watermark

    def put(self, path, payload) -> int:
        group, _ = split_path(path)
        if not isinstance(payload, (bytes, bytearray)):
            raise InvalidInputError("payload must be bytes")
        with self._cond:
            version = self._versions.get(group, 0) + 1
            self._versions[group] = version
            self._records[path] = (bytes(payload), version)
            self._cond.notify_all()
            return version

    def get(self, path):
        split_path(path)
        with self._cond:
            try:
                return self._records[path]
            except KeyError:
                raise KeyError(path) from None

    def delete(self, path) -> int:
        group, _ = split_path(path)
        with self._cond:
            if path not in self._records:
                raise KeyError(path)
            del self._records[path]
            version = self._versions.get(group, 0) + 1
            self._versions[group] = version
            self._cond.notify_all()
            return version

    def list_group(self, group_id):
        with self._cond:
            prefix = group_id + "/"
            return sorted(p for p in self._records if p.startswith(prefix))

    def group_bytes(self, group_id) -> int:
        with self._cond:
            prefix = group_id + "/"
            return sum(len(payload) for p, (payload, _) in self._records.items()
                       if p.startswith(prefix))

    def _group_version(self, group_id):
        return self._versions.get(group_id, 0)

    def _surviving_changes(self, group_id, version):
        prefix = group_id + "/"
        return sorted(p for p, (_, v) in self._records.items()
                      if p.startswith(prefix) and v > version)


class DirectoryStore(_StoreBase):
    """Filesystem backend: <root>/<group>/<name> plus a per-group index file.

    Writes go through a temp file and rename so readers never observe a
    torn record.  The index file carries the group watermark and each
    record's version.
    """

    _INDEX = ".index.json"

    def __init__(self, root):
        super().__init__()
        self.root = os.fspath(root)
        os.makedirs(self.root, exist_ok=True)

    def _group_dir(self, group_id):
        if not _NAME_RE.match(group_id):
            raise InvalidInputError(f"bad group id: {group_id!r}")
        return os.path.join(self.root, group_id)

    def _read_index(self, group_id):
        try:
            with open(os.path.join(self._group_dir(group_id), self._INDEX)) as fh:
                return json.load(fh)
        except FileNotFoundError:
            return {"version": 0, "records": {}}

    def _write_atomic(self, directory, name, data):
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, os.path.join(directory, name))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def _write_index(self, group_id, index):
        self._write_atomic(self._group_dir(group_id), self._INDEX,
                           json.dumps(index, sort_keys=True).encode())

    def put(self, path, payload) -> int:
        group, name = split_path(path)
        if not isinstance(payload, (bytes, bytearray)):
            raise InvalidInputError("payload must be bytes")
        with self._cond:
            gdir = self._group_dir(group)
            os.makedirs(gdir, exist_ok=True)
            index = self._read_index(group)
            index["version"] += 1
            index["records"][name] = index["version"]
            self._write_atomic(gdir, name, bytes(payload))
            self._write_index(group, index)
            self._cond.notify_all()
            return index["version"]

    def get(self, path):
        group, name = split_path(path)
        with self._cond:
            index = self._read_index(group)
            if name not in index["records"]:
                raise KeyError(path)
            with open(os.path.join(self._group_dir(group), name), "rb") as fh:
                return fh.read(), index["records"][name]

    def delete(self, path) -> int:
        group, name = split_path(path)
        with self._cond:
            index = self._read_index(group)
            if name not in index["records"]:
                raise KeyError(path)
            del index["records"][name]
            index["version"] += 1
            os.unlink(os.path.join(self._group_dir(group), name))
            self._write_index(group, index)
            self._cond.notify_all()
            return index["version"]

    def list_group(self, group_id):
        with self._cond:
            index = self._read_index(group_id)
            return sorted(f"{group_id}/{name}" for name in index["records"])

    def group_bytes(self, group_id) -> int:
        with self._cond:
            index = self._read_index(group_id)
            gdir = self._group_dir(group_id)
            return sum(os.path.getsize(os.path.join(gdir, name))
                       for name in index["records"])

    def _group_version(self, group_id):
        return self._read_index(group_id)["version"]

    def _surviving_changes(self, group_id, version):
        index = self._read_index(group_id)
        return sorted(f"{group_id}/{name}"
                      for name, v in index["records"].items() if v > version)
