"""Abstract syntax for the two process calculi.

Processes are multisets of action-sequence subprocesses, kept as tuples
sorted under a fixed total order so that multiset equality is plain
equality.  Sync actions are the tokens "!" (send) and "?" (receive);
lock actions are "P<i>" (put) and "T<i>" (take) for lock index i.
Stores render as strings over {e,f} and blocking patterns as strings
over {p,t}; both are kept in that rendered form.
"""

from __future__ import annotations

from dataclasses import dataclass

SEND = "!"
RECV = "?"

EMPTY = "e"
FULL = "f"

PUT_BLOCKS = "p"
TAKE_BLOCKS = "t"

# ASCII alias for the success terminator; "✓" is accepted on input.
SUCCESS_CHAR = "#"
NIL_CHAR = "0"
CHECKMARK = "✓"


class ParseError(ValueError):
    """Input text does not match the grammar.  Carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class InvalidProcess(ValueError):
    """A structurally invalid process, e.g. an empty multiset."""


def put(i: int) -> str:
    return f"P{i}"


def take(i: int) -> str:
    return f"T{i}"


def action_index(token: str) -> int:
    """Lock index of a lock action token."""
    return int(token[1:])


def is_put(token: str) -> bool:
    return token[0] == "P"


class Subproc:
    """One subprocess: a finite action sequence plus a terminator.

    ``success`` is True for the ✓ terminator, False for 0.  Instances are
    immutable and hash-cached; they are shared freely.
    """

    __slots__ = ("actions", "success", "_hash")

    def __init__(self, actions: tuple[str, ...], success: bool):
        object.__setattr__(self, "actions", tuple(actions))
        object.__setattr__(self, "success", bool(success))
        object.__setattr__(self, "_hash", hash((self.actions, self.success)))

    def __setattr__(self, name, value):
        raise AttributeError("Subproc is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Subproc)
            and self.actions == other.actions
            and self.success == other.success
        )

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Subproc, (self.actions, self.success))

    def key(self) -> tuple:
        # Canonical order: length, then token-lexicographic, then 0 < ✓.
        return (len(self.actions), self.actions, self.success)

    def __lt__(self, other: "Subproc") -> bool:
        return self.key() < other.key()

    @property
    def is_bare_success(self) -> bool:
        return self.success and not self.actions

    def head(self) -> str | None:
        return self.actions[0] if self.actions else None

    def tail(self) -> "Subproc":
        return Subproc(self.actions[1:], self.success)

    def render(self) -> str:
        # Lock sequences separate the nil terminator ("P3T2 0"), sync
        # ones do not ("!?0"); success sticks to the sequence either way.
        sep = " " if not self.success and self.actions and len(self.actions[0]) > 1 else ""
        return "".join(self.actions) + sep + (SUCCESS_CHAR if self.success else NIL_CHAR)

    def __repr__(self):
        return f"Subproc({self.render()!r})"


class Process:
    """A canonical multiset of subprocesses (sorted tuple, never empty)."""

    __slots__ = ("subs", "_hash")

    def __init__(self, subs):
        subs = tuple(sorted(subs, key=Subproc.key))
        if not subs:
            raise InvalidProcess("a process needs at least one subprocess")
        object.__setattr__(self, "subs", subs)
        object.__setattr__(self, "_hash", hash(subs))

    def __setattr__(self, name, value):
        raise AttributeError("Process is immutable")

    def __eq__(self, other):
        return isinstance(other, Process) and self.subs == other.subs

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Process, (self.subs,))

    def __len__(self):
        return len(self.subs)

    def replace(self, updates: dict[int, Subproc | None]) -> "Process":
        """New process with subprocess at each position replaced (None keeps it
        but with its head stripped callers handle; here None means drop)."""
        out = []
        for i, sub in enumerate(self.subs):
            if i in updates:
                new = updates[i]
                if new is not None:
                    out.append(new)
            else:
                out.append(sub)
        return Process(out)

    def render(self) -> str:
        return " | ".join(s.render() for s in self.subs)

    def total_actions(self) -> int:
        return sum(len(s.actions) for s in self.subs)

    def __repr__(self):
        return f"Process({self.render()!r})"


def canonicalize(subs) -> Process:
    """Canonical representative of a raw multiset of subprocesses."""
    return Process(subs)


# Lock configuration ---------------------------------------------------------


@dataclass(frozen=True)
class LockConfig:
    """Number of locks, initial store, and per-lock blocking side."""

    k: int
    initial_store: str
    pattern: str

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if len(self.initial_store) != self.k or any(
            c not in (EMPTY, FULL) for c in self.initial_store
        ):
            raise ValueError(f"store {self.initial_store!r} invalid for k={self.k}")
        if len(self.pattern) != self.k or any(
            c not in (PUT_BLOCKS, TAKE_BLOCKS) for c in self.pattern
        ):
            raise ValueError(f"pattern {self.pattern!r} invalid for k={self.k}")


def default_config(k: int, store: str, pattern: str | None = None) -> LockConfig:
    return LockConfig(k, store, pattern if pattern is not None else PUT_BLOCKS * k)


# Parsing --------------------------------------------------------------------


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _parse_process(text: str, scan_actions) -> Process:
    """Shared parser: split on '|', feed each chunk to an action scanner."""
    subs: list[Subproc] = []
    chunk_start = 0
    chunks = []
    for i, c in enumerate(text):
        if c == "|":
            chunks.append((chunk_start, text[chunk_start:i]))
            chunk_start = i + 1
    chunks.append((chunk_start, text[chunk_start:]))
    for start, chunk in chunks:
        subs.append(_parse_subproc(text, start, chunk, scan_actions))
    return Process(subs)


def _parse_subproc(text: str, start: int, chunk: str, scan_actions) -> Subproc:
    actions: list[str] = []
    terminator: bool | None = None
    pos = 0
    n = len(chunk)
    while pos < n:
        c = chunk[pos]
        if c.isspace():
            pos += 1
            continue
        if terminator is not None:
            raise ParseError(
                f"unexpected {c!r} after terminator", _byte_offset(text, start + pos)
            )
        if c == NIL_CHAR:
            terminator = False
            pos += 1
        elif c in (SUCCESS_CHAR, CHECKMARK):
            terminator = True
            pos += 1
        else:
            pos = scan_actions(text, start, chunk, pos, actions)
    return Subproc(tuple(actions), terminator if terminator is not None else False)


def parse_sync_process(text: str) -> Process:
    """Parse e.g. ``"?!0 | !!✓ | ?0"`` into a canonical process.

    A missing terminator means 0; "#" is the ASCII alias of ✓.
    """

    def scan(full, start, chunk, pos, actions):
        c = chunk[pos]
        if c in (SEND, RECV):
            actions.append(c)
            return pos + 1
        raise ParseError(f"unexpected {c!r}", _byte_offset(full, start + pos))

    return _parse_process(text, scan)


def parse_lock_process(text: str, k: int) -> Process:
    """Parse compact lock syntax like ``"P1T3P2T1#"`` for the given k ≤ 9."""
    if not 1 <= k <= 9:
        raise ValueError("k must be between 1 and 9")

    def scan(full, start, chunk, pos, actions):
        c = chunk[pos]
        if c in ("P", "T"):
            if pos + 1 >= len(chunk) or not chunk[pos + 1].isdigit():
                raise ParseError(
                    f"{c!r} needs a lock index", _byte_offset(full, start + pos)
                )
            idx = int(chunk[pos + 1])
            if not 1 <= idx <= k:
                raise ParseError(
                    f"lock index {idx} out of range 1..{k}",
                    _byte_offset(full, start + pos + 1),
                )
            actions.append(c + chunk[pos + 1])
            return pos + 2
        raise ParseError(f"unexpected {c!r}", _byte_offset(full, start + pos))

    return _parse_process(text, scan)


def parse_store(text: str, k: int) -> str:
    if len(text) != k:
        raise ParseError(f"store needs exactly {k} cells, got {len(text)}", 0)
    for i, c in enumerate(text):
        if c not in (EMPTY, FULL):
            raise ParseError(f"invalid store cell {c!r}", i)
    return text


def parse_pattern(text: str, k: int) -> str:
    if len(text) != k:
        raise ParseError(f"pattern needs exactly {k} entries, got {len(text)}", 0)
    for i, c in enumerate(text):
        if c not in (PUT_BLOCKS, TAKE_BLOCKS):
            raise ParseError(f"invalid pattern entry {c!r}", i)
    return text


def parse_lock_sequence(text: str, k: int) -> tuple[str, ...]:
    """Parse a bare action sequence like ``"P1T3P2T1"`` (no terminator)."""
    proc = parse_lock_process(text, k)
    if len(proc.subs) != 1 or proc.subs[0].success:
        raise ParseError("expected a bare action sequence", 0)
    return proc.subs[0].actions


def render(value) -> str:
    """Render a Process or Subproc back to its canonical text."""
    return value.render()
