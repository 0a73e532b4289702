"""Unit tests for compositions and structure labels."""

from itertools import product

import pytest

from entstruct.core.exceptions import DomainError
from entstruct.physics.structure import (
    Composition,
    class_index,
    class_pair,
    class_table,
    class_table_hash,
    closed_form_class_count,
    compositions_by_recursion,
    enumerate_compositions,
    label_of,
)


class TestEnumerateCompositions:
    """Tests for composition enumeration."""

    def test_single_qubit(self):
        assert [c.blocks for c in enumerate_compositions(1)] == [(1,)]

    def test_three_qubits(self):
        """P(3) = {[1,1,1], [1,2], [2,1], [3]}."""
        blocks = [c.blocks for c in enumerate_compositions(3)]

        assert blocks == [(1, 1, 1), (1, 2), (2, 1), (3,)]

    @pytest.mark.parametrize("n", range(1, 17))
    def test_size_is_power_of_two(self, n):
        """|P(n)| = 2^(n-1)."""
        assert len(enumerate_compositions(n)) == 2 ** (n - 1)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_matches_concatenation_recursion(self, n):
        """Mask enumeration and the concatenation recursion build the same set."""
        enumerated = {c.blocks for c in enumerate_compositions(n)}

        assert enumerated == compositions_by_recursion(n)

    def test_lexicographic_order(self):
        blocks = [c.blocks for c in enumerate_compositions(6)]

        assert blocks == sorted(blocks)
        assert len(set(blocks)) == len(blocks)

    def test_zero_qubits_rejected(self):
        with pytest.raises(DomainError):
            enumerate_compositions(0)

    def test_invalid_composition_rejected(self):
        with pytest.raises(DomainError) as exc_info:
            Composition(4, (2, 1))

        assert exc_info.value.code == "INVALID_COMPOSITION"


class TestLabels:
    """Tests for (intactness, depth) labels and the class table."""

    @pytest.mark.parametrize(
        "blocks,expected",
        [
            ((4,), (1, 4, 0)),
            ((2, 2), (2, 2, 1)),
            ((1, 3), (2, 3, 2)),
            ((1, 1, 2), (3, 2, 3)),
            ((1, 1, 1, 1), (4, 1, 4)),
        ],
    )
    def test_label_of(self, blocks, expected):
        """Intactness = number of blocks, depth = largest block."""
        label = label_of(Composition(4, blocks))

        assert (label.intactness, label.depth, label.class_index) == expected

    def test_class_table_n4(self):
        assert class_table(4) == ((1, 4), (2, 2), (2, 3), (3, 2), (4, 1))

    def test_class_table_n5_size(self):
        assert len(class_table(5)) == 7

    @pytest.mark.parametrize("n", range(1, 7))
    def test_class_table_matches_partitions(self, n):
        """The table is exactly the set of (m, d) reached by some set partition of n elements."""
        reached = set()
        for assignment in product(range(n), repeat=n):
            sizes = [assignment.count(b) for b in set(assignment)]
            reached.add((len(sizes), max(sizes)))

        assert reached == set(class_table(n))

    @pytest.mark.parametrize("n", range(1, 11))
    def test_every_class_has_a_composition(self, n):
        labels = {(label_of(c).intactness, label_of(c).depth) for c in enumerate_compositions(n)}

        assert labels == set(class_table(n))

    def test_closed_form_count_n4(self):
        assert closed_form_class_count(4) == 4

    @pytest.mark.parametrize("n", range(1, 17))
    def test_closed_form_count_is_one_short(self, n):
        """The closed-form count is one less than the enumerated table at every n."""
        assert closed_form_class_count(n) == len(class_table(n)) - 1

    @pytest.mark.parametrize("n", [2, 5, 9])
    def test_index_round_trip(self, n):
        for index, (m, d) in enumerate(class_table(n)):
            assert class_index(n, m, d) == index
            assert class_pair(n, index) == (m, d)

    def test_infeasible_pair(self):
        """(2, 1) cannot cover four qubits."""
        with pytest.raises(DomainError) as exc_info:
            class_index(4, 2, 1)

        assert exc_info.value.code == "INFEASIBLE_LABEL"

    def test_class_pair_out_of_range(self):
        with pytest.raises(DomainError):
            class_pair(4, 5)

    def test_table_hash(self):
        """Stable 16-hex-digit digest, distinct per n."""
        assert class_table_hash(4) == class_table_hash(4)
        assert len(class_table_hash(4)) == 16
        assert class_table_hash(4) != class_table_hash(5)
