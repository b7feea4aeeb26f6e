import pytest
from hypothesis import given, settings, strategies as st

from dialectid.arff import (
    MISSING,
    ArffError,
    AttributeSpec,
    Dataset,
    Instance,
    load_arff,
    parse_arff,
    save_arff,
    validate,
    write_arff,
)

SIMPLE = "@relation r\n@attribute text string\n@attribute label {A,B}\n@data\n'x',A\n"


def test_parse_simple_document():
    d = parse_arff(SIMPLE)
    assert d.relation == "r"
    assert [a.name for a in d.attributes] == ["text", "label"]
    assert d.class_index == 1
    assert d.instances[0].values == ("x", "A")


def test_header_keywords_are_case_insensitive_and_comments_skipped():
    text = "% comment\n@RELATION r\n@Attribute x NUMERIC\n@ATTRIBUTE c {a,b}\n@DATA\n% row comment\n1.5,b\n"
    d = parse_arff(text)
    assert d.instances[0].values == (1.5, "b")


def test_undeclared_nominal_value_reports_line():
    with pytest.raises(ArffError) as err:
        parse_arff(SIMPLE + "'y',C\n")
    assert "undeclared nominal value" in str(err.value)
    assert err.value.line == 6


def test_arity_mismatch_reports_line():
    with pytest.raises(ArffError) as err:
        parse_arff(SIMPLE + "'y',A,3\n")
    assert "arity" in str(err.value)
    assert err.value.line == 6


def test_data_row_before_header():
    with pytest.raises(ArffError) as err:
        parse_arff("@relation r\n'x',A\n")
    assert err.value.line == 2


@pytest.mark.parametrize(
    "text",
    [
        "@relation r\n@attribute\n@data\n",
        "@relation r\n@attribute x date\n@data\n",
        "@relation r\n@attribute c {a,b}\n",
        "@relation r\n@bogus\n@data\n",
    ],
)
def test_malformed_headers(text):
    with pytest.raises(ArffError):
        parse_arff(text)


def test_sparse_rows_fill_defaults():
    text = "@relation r\n@attribute a numeric\n@attribute b numeric\n@attribute c {x,y}\n@data\n{1 2.5}\n{0 1,2 y}\n"
    d = parse_arff(text)
    assert d.instances[0].values == (0.0, 2.5, "x")
    assert d.instances[1].values == (1.0, 0.0, "y")


def test_quoted_cells_and_escapes():
    text = "@relation r\n@attribute t string\n@attribute c {'a b',\"c,d\"}\n@data\n'l\\'été\\n',\"c,d\"\n"
    d = parse_arff(text)
    assert d.instances[0].values == ("l'été\n", "c,d")


def test_missing_marker():
    d = parse_arff("@relation r\n@attribute x numeric\n@attribute c {a}\n@data\n?,a\n")
    assert d.instances[0][0] is MISSING


def test_write_emits_sections_in_order():
    out = write_arff(parse_arff(SIMPLE))
    assert out.index("@relation") < out.index("@attribute") < out.index("@data")


def test_apostrophe_cell_round_trips():
    d = Dataset("r", (AttributeSpec.string("t"), AttributeSpec.nominal("c", ["A"])), (Instance(("l'été", "A")),))
    text = write_arff(d)
    assert "l'été" not in text.split("@data")[1].replace("\\'", "")
    assert parse_arff(text) == d


def test_sparse_write_lists_only_nonzeros():
    attrs = tuple(AttributeSpec.numeric(f"f{i}") for i in range(10000)) + (AttributeSpec.nominal("c", ["A", "B"]),)
    defaults = tuple(a.default() for a in attrs)
    inst = Instance.sparse({3: 1.0, 9000: 2.0, 10000: "A"}, defaults)
    out = write_arff(Dataset("r", attrs, (inst,)), sparse=True)
    row = out.rstrip("\n").split("\n")[-1]
    assert row == "{3 1, 9000 2}"


def test_validate():
    good = parse_arff(SIMPLE)
    assert validate(good) == []
    bad = Dataset("r", good.attributes, (Instance(("x", "A", 1.0)),))
    v = validate(bad)
    assert len(v) == 1 and v[0].instance == 0
    numeric_class = Dataset("r", (AttributeSpec.string("t"), AttributeSpec.numeric("y")), ())
    assert [x.message for x in validate(numeric_class)] == ["class must be nominal"]


def test_file_round_trip(tmp_path):
    d = parse_arff(SIMPLE)
    save_arff(d, tmp_path / "d.arff")
    assert load_arff(tmp_path / "d.arff") == d


cell_text = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(cell_text, st.sampled_from(["A", "B"]), st.one_of(st.none(), st.floats(allow_nan=False, allow_infinity=False))), max_size=6))
def test_round_trip_property(rows):
    attrs = (AttributeSpec.string("text"), AttributeSpec.numeric("x"), AttributeSpec.nominal("class", ["A", "B"]))
    insts = tuple(Instance((t, MISSING if x is None else x, c)) for t, c, x in rows)
    d = Dataset("r", attrs, insts)
    for sparse in (False, True):
        assert parse_arff(write_arff(d, sparse=sparse)) == d
