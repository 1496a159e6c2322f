"""
    Partition.py

    Contains coalition structures (partitions of the providers into disjoint coalitions) and the PayoffMatrix that
    compares the dual payoff and the Shapley value across every structure.

    Each block of a structure is treated as a game of its own: its members share v(block), priced at the block's own
    LP duals or split by the Shapley value of the game restricted to the block's subsets.
"""

from __future__ import annotations

import io
import json

import pandas as pd

from meshcoop.Allocation import shapley, dual_payoff
from meshcoop.Coalition import Coalition, CharacteristicFunction
from meshcoop.Errors import SizeError, ValidationError
from meshcoop.Network import Network
from meshcoop.Utils import log, approx_geq, format_payoff, GAME_TOLERANCE

# Bell(12) = 4213597 structures.
MAX_PARTITION_PROVIDERS = 12

class CoalitionStructure():
    """A partition of the providers 1..M into non-empty disjoint coalitions."""

    def __init__(self, blocks: list[Coalition], providers: int | None = None):
        """Creates a coalition structure.

        Args:
            blocks (``list[Coalition]``): The coalitions of the structure.
            providers (``int | None``, optional): M; defaults to the largest provider id in the blocks.

        Raises:
            ``ValidationError``: Raised if the blocks are empty, overlap or do not cover 1..M.
        """
        blocks = [Coalition.of(block) for block in blocks]
        covered = 0

        for block in blocks:
            if (block.is_empty()):
                raise ValidationError("Coalition structures cannot contain an empty block.")
            if (block.mask & covered):
                raise ValidationError("Blocks of a coalition structure must be disjoint.", [block])
            covered |= block.mask

        providers = providers if providers is not None else covered.bit_length()
        if (covered != Coalition.grand(providers).mask):
            raise ValidationError(f"Blocks must cover providers 1..{providers}.", blocks)

        self.__blocks = tuple(sorted(blocks, key = lambda block: block.members))
        self.__providers = providers

    def block_of(self, provider: int) -> Coalition:
        for block in self.__blocks:
            if provider in block:
                return block
        raise KeyError(provider)

    def sort_key(self):
        return (-len(self.__blocks), [block.members for block in self.__blocks])

    def label(self) -> str:
        return "{" + ", ".join(block.label() for block in self.__blocks) + "}"

    def __iter__(self):
        return iter(self.__blocks)

    def __len__(self):
        return len(self.__blocks)

    def __eq__(self, other):
        return isinstance(other, CoalitionStructure) and self.__blocks == other.blocks

    def __hash__(self):
        return hash(self.__blocks)

    def __repr__(self):
        return "{" + ", ".join(repr(block) for block in self.__blocks) + "}"

    @property
    def blocks(self) -> tuple[Coalition, ...]:
        return self.__blocks

    @property
    def providers(self) -> int:
        return self.__providers

    @property
    def is_grand(self) -> bool:
        return len(self.__blocks) == 1

def _partitions(members: list[int]):
    if (len(members) == 1):
        yield [members]
        return

    first = members[0]
    for smaller in _partitions(members[1:]):
        for index, block in enumerate(smaller):
            yield smaller[:index] + [[first] + block] + smaller[index + 1:]
        yield [[first]] + smaller

def enumerate_partitions(providers: int) -> list[CoalitionStructure]:
    """Enumerates every coalition structure of M providers.

    Structures with more blocks come first; ties are ordered by their sorted block contents.

    Args:
        providers (``int``): M.

    Raises:
        ``SizeError``: Raised if M exceeds 12.

    Returns:
        ``list[CoalitionStructure]``: Bell(M) structures.
    """
    if (type(providers) != int or providers < 1):
        raise TypeError(f"providers should be a positive int, not {providers!r}")

    if (providers > MAX_PARTITION_PROVIDERS):
        raise SizeError(f"Cannot enumerate the coalition structures of {providers} providers (at most {MAX_PARTITION_PROVIDERS}).")

    structures = [
        CoalitionStructure([Coalition.from_members(block) for block in partition], providers)
        for partition in _partitions(list(range(1, providers + 1)))
    ]

    return sorted(structures, key = CoalitionStructure.sort_key)

class StructureRow():
    """One row of a PayoffMatrix."""

    def __init__(self, *, structure: CoalitionStructure, dual: dict[int, float] | None, shapley: dict[int, float], value: float, degenerate: bool = False):
        self.__structure = structure
        self.__dual = dual
        self.__shapley = shapley
        self.__value = value
        self.__degenerate = degenerate

    def payoff(self, method: str, provider: int) -> float | None:
        payoffs = self.__dual if method == "dual_payoff" else self.__shapley
        return None if payoffs is None else payoffs[provider]

    def __repr__(self):
        return f"<StructureRow({self.__structure!r}, v={self.__value:.4f})>"

    @property
    def structure(self) -> CoalitionStructure:
        return self.__structure

    @property
    def dual(self) -> dict[int, float] | None:
        """Per-provider dual payoff, or None when LP duals were not available."""
        return None if self.__dual is None else self.__dual.copy()

    @property
    def shapley(self) -> dict[int, float]:
        return self.__shapley.copy()

    @property
    def value(self) -> float:
        """v(omega): the summed value of the structure's blocks."""
        return self.__value

    @property
    def degenerate(self) -> bool:
        return self.__degenerate

class PayoffMatrix():
    """Per-structure payoffs of every provider under both allocation methods."""

    def __init__(self, providers: int, rows: list[StructureRow]):
        self.__providers = providers
        self.__rows = list(rows)

    def row(self, structure: CoalitionStructure | list) -> StructureRow:
        structure = structure if isinstance(structure, CoalitionStructure) else CoalitionStructure(structure, self.__providers)

        for row in self.__rows:
            if (row.structure == structure):
                return row

        raise KeyError(structure)

    def stable_structures(self, method: str = "shapley", tolerance: float = GAME_TOLERANCE) -> list[CoalitionStructure]:
        """Returns the structures under which every provider does at least as well as under any other structure.

        Args:
            method (``str``, optional): ``"shapley"`` or ``"dual_payoff"``. Defaults to ``"shapley"``.
            tolerance (``float``, optional): Relative tolerance. Defaults to 1e-6.
        """
        rows = [row for row in self.__rows if row.payoff(method, 1) is not None]
        stable = []

        for candidate in rows:
            if all(approx_geq(candidate.payoff(method, provider), other.payoff(method, provider), tolerance)
                   for other in rows for provider in range(1, self.__providers + 1)):
                stable.append(candidate.structure)

        return stable

    def to_frame(self) -> pd.DataFrame:
        """Returns the matrix as a DataFrame with columns structure, mu_1..mu_M, phi_1..phi_M, v."""
        providers = range(1, self.__providers + 1)
        records = []

        for row in self.__rows:
            record = {"structure": row.structure.label()}
            record.update({f"mu_{m}": row.payoff("dual_payoff", m) for m in providers})
            record.update({f"phi_{m}": row.payoff("shapley", m) for m in providers})
            record["v"] = row.value
            records.append(record)

        columns = ["structure"] + [f"mu_{m}" for m in providers] + [f"phi_{m}" for m in providers] + ["v"]
        return pd.DataFrame.from_records(records, columns = columns)

    def to_text(self) -> str:
        """Renders the matrix as an aligned plain-text table."""
        frame = self.to_frame()
        formatters = {column: (lambda value: format_payoff(None if pd.isna(value) else value)) for column in frame.columns if column != "structure"}
        return frame.to_string(index = False, formatters = formatters, na_rep = "-", justify = "right")

    def to_csv(self) -> str:
        buffer = io.StringIO()
        self.to_frame().to_csv(buffer, index = False, float_format = "%.4f", lineterminator = "\n")
        return buffer.getvalue()

    def __getitem__(self, index: int) -> StructureRow:
        return self.__rows[index]

    def __iter__(self):
        return iter(self.__rows)

    def __len__(self):
        return len(self.__rows)

    def __str__(self):
        return json.dumps([{"structure": repr(row.structure), "dual": row.dual, "shapley": row.shapley, "v": row.value} for row in self.__rows])

    @property
    def providers(self) -> int:
        return self.__providers

    @property
    def rows(self) -> list[StructureRow]:
        return list(self.__rows)

def structure_table(network: Network | None, cf: CharacteristicFunction) -> PayoffMatrix:
    """Builds the payoff matrix of every coalition structure.

    Args:
        network (``Network | None``): The network the game was computed on; None when the game was given by values,
            in which case dual payoffs of non-singleton blocks are left empty.
        cf (``CharacteristicFunction``): A complete game.

    Returns:
        ``PayoffMatrix``: One row per structure, in canonical order.
    """
    cf.require_complete()
    rows = []

    for structure in enumerate_partitions(cf.providers):
        dual = {}
        split = {}
        degenerate = False

        for block in structure:
            split.update(shapley(cf, block).payoffs)

            if (dual is None):
                continue
            if (len(block) == 1):
                dual[block.members[0]] = cf.value(block)
            elif (network is not None and cf.solution(block) is not None):
                allocation = dual_payoff(network, cf, block)
                dual.update(allocation.payoffs)
                degenerate = degenerate or allocation.degenerate
            else:
                dual = None

        value = sum(cf.value(block) for block in structure)
        rows.append(StructureRow(structure = structure, dual = dual, shapley = split, value = value, degenerate = degenerate))

    log(f"> [meshcoop.Partition]: Built a payoff matrix of {len(rows)} coalition structures.")

    return PayoffMatrix(cf.providers, rows)
