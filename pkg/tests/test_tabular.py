import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalab.errors import (
    DuplicateHeader,
    EmptyFile,
    RaggedRows,
    TooFewRows,
)
from causalab.tabular import (
    ColumnKind,
    MissingPolicy,
    friendliness_score,
    load_csv,
    prepare_for_discovery,
    profile,
)


def csv(text: str):
    return load_csv(text.encode("utf-8"), "test.csv")


class TestLoadCsv:
    def test_minimal_mixed_table(self):
        ds = csv("a,b\n1,x\n2,y")
        a, b = ds.columns
        assert a.kind is ColumnKind.CONTINUOUS
        assert a.values == (1.0, 2.0)
        assert b.kind is ColumnKind.CATEGORICAL
        assert b.values == ("x", "y")
        assert ds.row_count == 2

    def test_blank_field_becomes_missing(self):
        ds = csv("a\n1\n\n3")
        col = ds.columns[0]
        assert col.values == (1.0, None, 3.0)
        p = profile(ds)
        assert p.column("a").missing_rate == pytest.approx(1 / 3)

    @pytest.mark.parametrize("token", ["NA", "na", "NaN", "null", "NULL"])
    def test_missing_literals(self, token):
        ds = csv(f"a\n1\n{token}\n2")
        assert ds.columns[0].values == (1.0, None, 2.0)
        assert ds.columns[0].kind is ColumnKind.CONTINUOUS

    def test_quoted_fields_with_commas(self):
        ds = csv('name,score\n"Smith, Jo",3\n"O""Neil",4')
        assert ds.columns[0].values == ("Smith, Jo", 'O"Neil')
        assert ds.columns[1].values == (3.0, 4.0)

    def test_non_finite_literal_is_categorical(self):
        ds = csv("a\n1\ninf")
        assert ds.columns[0].kind is ColumnKind.CATEGORICAL

    def test_empty_file(self):
        with pytest.raises(EmptyFile):
            csv("")

    def test_ragged_rows_reports_index(self):
        with pytest.raises(RaggedRows) as exc:
            csv("a,b\n1,2\n3")
        assert exc.value.row_index == 2

    def test_duplicate_header(self):
        with pytest.raises(DuplicateHeader):
            csv("a,a\n1,2")

    def test_bundled_signaling_dataset(self):
        from pathlib import Path

        blob = (Path(__file__).parent.parent / "data" / "sachs.csv").read_bytes()
        ds = load_csv(blob, "sachs.csv")
        assert len(ds.columns) == 11
        assert all(c.kind is ColumnKind.CONTINUOUS for c in ds.columns)
        assert {"Raf", "Mek", "Erk", "PKA", "PKC"} <= set(ds.column_names())


class TestProfile:
    def test_self_correlation_is_one(self):
        p = profile(csv("x,y\n1,9\n2,7\n3,8\n4,1"))
        assert p.correlation[0][0] == 1.0
        assert p.correlation[1][1] == 1.0

    def test_perfect_linear_dependence(self):
        p = profile(csv("x,y\n1,2\n2,4\n3,6\n4,8"))
        assert p.correlation[0][1] == pytest.approx(1.0, abs=1e-12)

    def test_histogram_two_bins(self):
        # 4 rows [1, 2, 3, 100], bins=2 -> [(1, 50.5, 3), (50.5, 100, 1)]
        p = profile(csv("a\n1\n2\n3\n100"), bins=2)
        hist = p.column("a").histogram
        assert hist == ((1.0, 50.5, 3), (50.5, 100.0, 1))

    def test_histogram_counts_sum_to_observed(self):
        p = profile(csv("a\n1\n\n3\n5\n9"), bins=3)
        assert sum(c for _, _, c in p.column("a").histogram) == 4

    def test_constant_column_warning_and_zero_corr(self):
        p = profile(csv("a,b\n1,1\n1,2\n1,3"))
        assert p.correlation[0][1] == 0.0
        assert any("constant" in w for w in p.warnings)

    def test_correlation_pairwise_complete(self):
        # the missing row in a must not poison the b/c correlation
        p = profile(csv("a,b,c\n1,1,2\n,2,4\n3,3,6\n4,4,8"))
        assert p.correlation_between("b", "c") == pytest.approx(1.0, abs=1e-12)

    def test_symmetry(self):
        p = profile(csv("a,b,c\n1,5,2\n2,3,9\n3,8,4\n4,1,7\n5,9,6"))
        m = p.correlation
        for i in range(3):
            for j in range(3):
                assert abs(m[i][j] - m[j][i]) <= 1e-12
                assert -1.0 <= m[i][j] <= 1.0


class TestFriendliness:
    def _profile(self, text):
        ds = csv(text)
        return profile(ds), ds.row_count

    def test_clean_data_scores_100(self):
        rows = "\n".join(f"{i},{i * 2 + 1},{(i * 7) % 5}" for i in range(50))
        p, n = self._profile("a,b,c\n" + rows)
        score, reasons = friendliness_score(p, n)
        assert score == 100
        assert reasons == []

    def test_one_constant_column_scores_90(self):
        rows = "\n".join(f"{i},5" for i in range(30))
        p, n = self._profile("a,b\n" + rows)
        score, reasons = friendliness_score(p, n)
        assert score == 90
        assert len(reasons) == 1

    def test_missing_plus_small_sample_scores_65(self):
        # mean missing rate 0.5 (-15) and rows < 5 * cols^2 (-20)
        p, n = self._profile("a,b\n1,\n,2\n3,\n,4")
        score, reasons = friendliness_score(p, n)
        assert score == 65
        assert len(reasons) == 2

    def test_pure_function(self):
        p, n = self._profile("a,b\n1,\n,2\n3,\n,4")
        assert friendliness_score(p, n) == friendliness_score(p, n)


class TestPrepare:
    def test_identity_when_complete(self):
        ds = csv("a,b\n1,2\n3,4")
        assert prepare_for_discovery(ds, MissingPolicy.DROP_ROWS) is ds

    def test_mean_impute(self):
        ds = csv("a,b\n1,1\n,2\n3,3")
        out = prepare_for_discovery(ds, MissingPolicy.MEAN_IMPUTE)
        assert out.column("a").values == (1.0, 2.0, 3.0)

    def test_drop_rows(self):
        body = "\n".join(f"{i},{i}" for i in range(12))
        ds = csv("a,b\n" + body + "\n,99")
        out = prepare_for_discovery(ds, MissingPolicy.DROP_ROWS)
        assert out.row_count == 12
        assert not out.has_missing()

    def test_drop_rows_too_few(self):
        ds = csv("a,b\n1,1\n,2\n3,")
        with pytest.raises(TooFewRows):
            prepare_for_discovery(ds, MissingPolicy.DROP_ROWS)

    def test_drop_never_changes_surviving_cells(self):
        ds = csv("a,b\n1,5\n,6\n3,7\n4,\n9,9\n" +
                 "\n".join(f"{i},{i}" for i in range(10, 20)))
        out = prepare_for_discovery(ds, MissingPolicy.DROP_ROWS)
        survivors = [
            r for r in range(ds.row_count)
            if all(c.values[r] is not None for c in ds.columns)
        ]
        for c_in, c_out in zip(ds.columns, out.columns):
            assert c_out.values == tuple(c_in.values[r] for r in survivors)


numeric_cell = st.one_of(
    st.none(),
    st.integers(min_value=-1000, max_value=1000).map(float),
)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.lists(numeric_cell, min_size=3, max_size=3),
        min_size=2,
        max_size=40,
    )
)
def test_profile_invariants(rows):
    lines = ["a,b,c"]
    for row in rows:
        lines.append(",".join("" if v is None else repr(v) for v in row))
    ds = csv("\n".join(lines))
    p = profile(ds)
    for cp in p.columns:
        assert 0.0 <= cp.missing_rate <= 1.0
        observed = ds.row_count - round(cp.missing_rate * ds.row_count)
        if cp.histogram:
            assert sum(c for _, _, c in cp.histogram) == observed
            los = [b[0] for b in cp.histogram]
            assert los == sorted(los)
    m = p.correlation
    k = len(m)
    for i in range(k):
        for j in range(k):
            assert -1.0 <= m[i][j] <= 1.0
            assert abs(m[i][j] - m[j][i]) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(
    st.lists(
        st.lists(numeric_cell, min_size=2, max_size=2),
        min_size=1,
        max_size=30,
    )
)
def test_mean_impute_removes_all_missing(rows):
    lines = ["a,b"]
    for row in rows:
        lines.append(",".join("" if v is None else repr(v) for v in row))
    ds = csv("\n".join(lines))
    if any(all(v is None for v in (r[i] for r in rows)) for i in range(2)):
        with pytest.raises(TooFewRows):
            prepare_for_discovery(ds, MissingPolicy.MEAN_IMPUTE)
        return
    out = prepare_for_discovery(ds, MissingPolicy.MEAN_IMPUTE)
    assert not out.has_missing()
    assert out.row_count == ds.row_count
