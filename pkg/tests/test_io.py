"""Matrix Market ingestion against a naive reader and scipy's."""

import numpy as np
import pytest
import scipy.io
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from sketchnla.io import (
    MatrixMarketError,
    load_dense,
    load_matrix_market,
    save_coordinate,
    save_csv,
    save_dense,
)


def naive_dense_read(path):
    """Brute-force coordinate reader used as the oracle: dense accumulation."""
    with open(path) as fh:
        header = fh.readline().lower().split()
        symmetric = header[4] == "symmetric"
        pattern = header[3] == "pattern"
        lines = [
            ln.strip()
            for ln in fh
            if ln.strip() and not ln.strip().startswith("%")
        ]
    n, d, _ = (int(t) for t in lines[0].split())
    out = np.zeros((n, d))
    for ln in lines[1:]:
        toks = ln.split()
        i, j = int(toks[0]) - 1, int(toks[1]) - 1
        v = 1.0 if pattern else float(toks[2])
        out[i, j] += v
        if symmetric and i != j:
            out[j, i] += v
    return out


def write(path, text):
    path.write_text(text)
    return str(path)


class TestCoordinateReader:
    def test_identity(self, tmp_path):
        p = write(
            tmp_path / "i.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n",
        )
        a = load_matrix_market(p)
        assert a.nnz == 2
        assert np.allclose(a.toarray(), np.eye(2))

    def test_duplicates_summed(self, tmp_path):
        p = write(
            tmp_path / "d.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 2.0\n1 1 2.0\n",
        )
        a = load_matrix_market(p)
        assert a.nnz == 1
        assert a.toarray()[0, 0] == 4.0

    def test_symmetric_expansion(self, tmp_path):
        p = write(
            tmp_path / "s.mtx",
            "%%MatrixMarket matrix coordinate real symmetric\n"
            "2 2 3\n1 1 2.0\n2 1 1.0\n2 2 3.0\n",
        )
        a = load_matrix_market(p)
        assert a.nnz == 4
        assert np.allclose(a.toarray(), naive_dense_read(p))
        assert np.allclose(a.toarray(), [[2, 1], [1, 3]])

    def test_pattern_and_integer_fields(self, tmp_path):
        p = write(
            tmp_path / "p.mtx",
            "%%MatrixMarket matrix coordinate pattern general\n2 3 2\n1 2\n2 3\n",
        )
        a = load_matrix_market(p)
        assert a.toarray()[0, 1] == 1.0 and a.toarray()[1, 2] == 1.0
        q = write(
            tmp_path / "q.mtx",
            "%%MatrixMarket matrix coordinate integer general\n1 1 1\n1 1 7\n",
        )
        assert load_matrix_market(q).toarray()[0, 0] == 7.0

    def test_complex_rejected(self, tmp_path):
        p = write(
            tmp_path / "c.mtx",
            "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0 2.0\n",
        )
        with pytest.raises(MatrixMarketError, match="field"):
            load_matrix_market(p)

    def test_parse_error_carries_line_number(self, tmp_path):
        p = write(
            tmp_path / "bad.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 x 2.0\n",
        )
        with pytest.raises(MatrixMarketError, match=":4:"):
            load_matrix_market(p)

    def test_index_out_of_range(self, tmp_path):
        p = write(
            tmp_path / "oob.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
        )
        with pytest.raises(MatrixMarketError, match="out of range"):
            load_matrix_market(p)

    def test_entry_count_mismatch(self, tmp_path):
        p = write(
            tmp_path / "short.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
        )
        with pytest.raises(MatrixMarketError, match="expected 2 entries"):
            load_matrix_market(p)

    def test_against_scipy(self, tmp_path, rng):
        a = sp.random_array((17, 9), density=0.3, rng=rng, format="csr")
        path = tmp_path / "r.mtx"
        save_coordinate(path, a)
        ours = load_matrix_market(path).toarray()
        theirs = np.asarray(scipy.io.mmread(str(path)).todense())
        assert np.allclose(ours, theirs)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_round_trip_is_identity(seed, tmp_path_factory):
    g = np.random.default_rng(seed)
    n, d = int(g.integers(1, 12)), int(g.integers(1, 12))
    dense = g.standard_normal((n, d)) * (g.random((n, d)) < 0.4)
    path = tmp_path_factory.mktemp("mm") / "m.mtx"
    save_coordinate(path, sp.csr_array(dense))
    back = load_matrix_market(path)
    assert np.allclose(back.toarray(), dense)
    # sparse -> dense -> sparse canonical round trip
    again = sp.csr_array(back.toarray())
    assert np.allclose(again.toarray(), back.toarray())


class TestDense:
    def test_array_round_trip(self, tmp_path, rng):
        a = rng.standard_normal((4, 3))
        save_dense(tmp_path / "a.mtx", a)
        assert np.allclose(load_dense(tmp_path / "a.mtx"), a)
        # array format is column-major; check against scipy too
        theirs = scipy.io.mmread(str(tmp_path / "a.mtx"))
        assert np.allclose(theirs, a)

    def test_dense_reads_coordinate(self, tmp_path, rng):
        a = rng.standard_normal((3, 3))
        save_coordinate(tmp_path / "c.mtx", sp.csr_array(a))
        assert np.allclose(load_dense(tmp_path / "c.mtx"), a)

    def test_csv(self, tmp_path):
        save_csv(tmp_path / "x.csv", np.array([[1.5, 2.0]]), header=["a", "b"])
        text = (tmp_path / "x.csv").read_text().splitlines()
        assert text[0] == "a,b"
        assert text[1] == "1.5,2.0"

    def test_bad_header(self, tmp_path):
        p = write(tmp_path / "h.mtx", "%%NotMatrixMarket\n1 1\n1.0\n")
        with pytest.raises(MatrixMarketError, match=":1:"):
            load_dense(p)
