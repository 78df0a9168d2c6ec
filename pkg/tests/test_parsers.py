"""Parser behaviour: detection corpus, structure extraction, tool mapping,
and the stubbed-CWL round trip."""

from __future__ import annotations

import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowhub.errors import (
    InvalidStructure,
    NotAWorkflow,
    NotFoundError,
    ParseError,
    SchemaError,
    SizeLimit,
)
from flowhub.parsers import (
    PortDecl,
    StepDecl,
    WorkflowStructure,
    detect_class,
    generate_abstract_cwl,
    map_tools_to_biotools,
    parse_cwl_abstract,
    parse_galaxy,
    parse_nextflow_manifest,
    parse_snakemake,
)

FIXTURES = Path(__file__).parent / "fixtures"
GALAXY_FIXTURE = (FIXTURES / "galaxy" / "find_transcripts.ga").read_bytes()


# ---------------------------------------------------------------------------
# detect_class
# ---------------------------------------------------------------------------


def corpus_cases():
    for class_dir in sorted((FIXTURES / "detect").iterdir()):
        for fixture in sorted(class_dir.iterdir()):
            yield pytest.param(class_dir.name, fixture, id=f"{class_dir.name}/{fixture.name}")


@pytest.mark.parametrize("expected,fixture", list(corpus_cases()))
def test_detect_corpus(expected, fixture):
    assert detect_class(fixture.name, fixture.read_bytes()) == expected


def test_detect_galaxy_probe_beats_extension():
    assert detect_class("wf.ga", b'{"a_galaxy_workflow": "true", "steps": {}}') == "galaxy"


def test_detect_nextflow_by_filename():
    assert detect_class("main.nf", b"workflow { }") == "nextflow"


def test_detect_fallback_other():
    assert detect_class("notes.txt", b"") == "other"


def test_detect_rejects_oversize():
    with pytest.raises(SizeLimit):
        detect_class("big.bin", b"x" * (16 * 1024 * 1024 + 1))


def test_detect_is_deterministic():
    content = (FIXTURES / "detect" / "cwl" / "align.cwl").read_bytes()
    assert {detect_class("align.cwl", content) for _ in range(5)} == {"cwl"}


# ---------------------------------------------------------------------------
# Galaxy
# ---------------------------------------------------------------------------


def test_galaxy_fixture_counts():
    # hand-counted from tests/fixtures/galaxy/find_transcripts.ga:
    # 7 steps (keys 0-6), 2 input steps, 3 workflow_outputs, 4 distinct tools
    structure = parse_galaxy(GALAXY_FIXTURE)
    assert structure.name == "Find transcripts - TSI"
    assert len(structure.steps) == 7
    assert len(structure.inputs) == 2
    assert len(structure.outputs) == 3
    assert len(structure.raw_tool_ids) == 4
    assert structure.language_version == "0.1"


def test_galaxy_steps_ordered_by_numeric_key():
    structure = parse_galaxy(GALAXY_FIXTURE)
    assert [s.id for s in structure.steps] == [str(i) for i in range(7)]


def test_galaxy_tool_ids_deduplicated_order_preserving():
    structure = parse_galaxy(GALAXY_FIXTURE)
    assert structure.raw_tool_ids == [
        "toolshed.g2.bx.psu.edu/repos/iuc/fastp/fastp/0.23.2+galaxy0",
        "toolshed.g2.bx.psu.edu/repos/iuc/rgrnastar/rna_star/2.7.10b+galaxy3",
        "toolshed.g2.bx.psu.edu/repos/iuc/stringtie/stringtie/2.2.1+galaxy1",
        "toolshed.g2.bx.psu.edu/repos/devteam/gffread/gffread/2.2.1.3+galaxy0",
    ]


def test_galaxy_zero_steps():
    structure = parse_galaxy(b'{"a_galaxy_workflow": "true", "name": "Empty", "steps": {}}')
    assert structure.steps == [] and structure.inputs == [] and structure.outputs == []


def test_galaxy_three_step_fixture():
    doc = {
        "name": "Mini",
        "steps": {
            "0": {"type": "data_input", "label": "reads", "tool_id": None},
            "1": {"type": "tool", "tool_id": "bwa", "name": "Map"},
            "2": {"type": "tool", "tool_id": "samtools", "name": "Sort"},
        },
    }
    structure = parse_galaxy(json.dumps(doc).encode())
    assert (len(structure.inputs), len(structure.steps), len(structure.raw_tool_ids)) == (1, 3, 2)


def test_galaxy_malformed_json_raises_parse_error_with_location():
    with pytest.raises(ParseError) as info:
        parse_galaxy(b'{"steps": {,}')
    assert info.value.line is not None


def test_galaxy_missing_steps_is_schema_error():
    with pytest.raises(SchemaError):
        parse_galaxy(b'{"a_galaxy_workflow": "true"}')


# ---------------------------------------------------------------------------
# CWL
# ---------------------------------------------------------------------------

MINIMAL_CWL = b"""\
cwlVersion: v1.2
class: Workflow
label: Minimal
inputs:
  reads:
    type: File
outputs:
  report:
    type: File
    outputSource: qc/report
steps:
  qc:
    in: {}
    out: [report]
    run: fastqc.cwl
"""


def test_cwl_minimal_counts():
    structure = parse_cwl_abstract(MINIMAL_CWL)
    assert (len(structure.inputs), len(structure.outputs), len(structure.steps)) == (1, 1, 1)
    assert structure.name == "Minimal"
    assert structure.raw_tool_ids == ["fastqc.cwl"]


def test_cwl_edam_format_extraction():
    doc = b"""\
cwlVersion: v1.2
class: Workflow
inputs:
  seqs:
    type: File
    format: http://edamontology.org/format_1929
outputs: {}
steps: {}
"""
    structure = parse_cwl_abstract(doc)
    assert structure.inputs[0].edam_format == "format_1929"


def test_cwl_intent_surfaces_edam_operation():
    doc = b"""\
cwlVersion: v1.2
class: Workflow
intent:
  - http://edamontology.org/operation_0525
inputs: {}
outputs: {}
steps: {}
"""
    structure = parse_cwl_abstract(doc)
    assert structure.edam_operations == ["operation_0525"]


def test_cwl_not_a_workflow():
    with pytest.raises(NotAWorkflow):
        parse_cwl_abstract(b"cwlVersion: v1.2\nclass: CommandLineTool\n")


def test_cwl_yaml_syntax_error():
    with pytest.raises(ParseError):
        parse_cwl_abstract(b"class: Workflow\ninputs: {a: [}\n")


def test_cwl_list_form_ports():
    doc = b"""\
cwlVersion: v1.2
class: Workflow
inputs:
  - id: a
    type: string
  - id: b
    type: File
outputs: []
steps: []
"""
    structure = parse_cwl_abstract(doc)
    assert [p.id for p in structure.inputs] == ["a", "b"]


# ---------------------------------------------------------------------------
# Nextflow / Snakemake
# ---------------------------------------------------------------------------


def test_nextflow_manifest_name():
    files = {"nextflow.config": b"manifest {\n  name = 'nf-core/demo'\n}\n"}
    assert parse_nextflow_manifest(files).name == "nf-core/demo"


def test_nextflow_empty_config():
    structure = parse_nextflow_manifest({"nextflow.config": b""})
    assert structure.name is None and structure.steps == []


def test_nextflow_version_pin_verbatim():
    files = {"nextflow.config": b"manifest {\n  nextflowVersion = '!>=23.04'\n}\n"}
    assert parse_nextflow_manifest(files).language_version == "!>=23.04"


def test_nextflow_dotted_assignments():
    files = {"nextflow.config": b"manifest.name = \"pipe\"\nmanifest.version = '2.1'\n"}
    structure = parse_nextflow_manifest(files)
    assert structure.name == "pipe" and structure.version == "2.1"


def test_nextflow_missing_files():
    with pytest.raises(NotFoundError):
        parse_nextflow_manifest({"README.md": b"#"})


def test_snakemake_rules():
    files = {"Snakefile": b'rule all:\n    input: "x"\n\nrule map:\n    shell: "m"\n\nrule call:\n    shell: "c"\n'}
    structure = parse_snakemake(files)
    assert [s.id for s in structure.steps] == ["all", "map", "call"]


def test_snakemake_empty():
    assert parse_snakemake({"Snakefile": b""}).steps == []


def test_snakemake_nested_location():
    files = {"workflow/Snakefile": b"rule everything:\n    input: []\n"}
    assert len(parse_snakemake(files).steps) == 1


def test_snakemake_missing():
    with pytest.raises(NotFoundError):
        parse_snakemake({"main.nf": b""})


def test_snakemake_fixture_layout_like_varlociraptor():
    # mirrors a repository with workflow/Snakefile plus config
    files = {
        "workflow/Snakefile": (FIXTURES / "detect" / "snakemake" / "Snakefile").read_bytes(),
        "config/config.yaml": b"samples: samples.tsv\n",
        "README.md": b"# dna-seq workflow\n",
    }
    structure = parse_snakemake(files)
    assert detect_class("Snakefile", files["workflow/Snakefile"]) == "snakemake"
    assert len(structure.steps) > 0


# ---------------------------------------------------------------------------
# bio.tools mapping
# ---------------------------------------------------------------------------


def test_toolshed_id_maps_via_heuristic():
    refs = map_tools_to_biotools(["toolshed.g2.bx.psu.edu/repos/iuc/bwa/bwa/0.7.17"])
    assert refs[0].biotools_id == "bwa"
    assert refs[0].display_name == "bwa"


def test_unknown_tool_gets_no_biotools_id():
    refs = map_tools_to_biotools(["my_local_tool"])
    assert refs[0].biotools_id is None
    assert refs[0].raw_id == "my_local_tool"


def test_mapping_table_override_wins():
    # deliberate conflict: the heuristic would say "bwa", the table says otherwise
    table = {"toolshed.g2.bx.psu.edu/repos/iuc/bwa/bwa/0.7.17": "bwa-mem2"}
    refs = map_tools_to_biotools(
        ["toolshed.g2.bx.psu.edu/repos/iuc/bwa/bwa/0.7.17"], mapping=table
    )
    assert refs[0].biotools_id == "bwa-mem2"


def test_mapping_table_on_stripped_name():
    refs = map_tools_to_biotools(["toolshed.g2.bx.psu.edu/repos/iuc/rgrnastar/rna_star/2.7.10b"])
    assert refs[0].biotools_id == "star"


def test_mapping_is_idempotent_and_order_preserving():
    ids = ["samtools", "my_local_tool", "toolshed.g2.bx.psu.edu/repos/iuc/fastp/fastp/0.23"]
    once = map_tools_to_biotools(ids)
    twice = map_tools_to_biotools(ids)
    assert once == twice
    assert [r.raw_id for r in once] == ids


# ---------------------------------------------------------------------------
# Abstract CWL generation and round trip
# ---------------------------------------------------------------------------


def test_generate_empty_structure():
    import yaml

    doc = yaml.safe_load(generate_abstract_cwl(WorkflowStructure()))
    assert doc["class"] == "Workflow"
    assert doc["inputs"] == {} and doc["outputs"] == {} and doc["steps"] == {}


def test_generate_round_trip_small():
    structure = WorkflowStructure(
        name="Two by one",
        inputs=[PortDecl("a", data_type="File"), PortDecl("b", data_type="string")],
        outputs=[PortDecl("out", data_type="File", source_step="s2")],
        steps=[StepDecl("s1"), StepDecl("s2")],
    )
    parsed = parse_cwl_abstract(generate_abstract_cwl(structure))
    assert [p.id for p in parsed.inputs] == ["a", "b"]
    assert [p.id for p in parsed.outputs] == ["out"]
    assert [s.id for s in parsed.steps] == ["s1", "s2"]


def test_generate_duplicate_ids_rejected():
    structure = WorkflowStructure(steps=[StepDecl("x"), StepDecl("x")])
    with pytest.raises(InvalidStructure):
        generate_abstract_cwl(structure)


def test_cross_parser_step_count_galaxy():
    galaxy = parse_galaxy(GALAXY_FIXTURE)
    regenerated = parse_cwl_abstract(generate_abstract_cwl(galaxy))
    assert len(regenerated.steps) == len(galaxy.steps)
    assert len(regenerated.inputs) == len(galaxy.inputs)


def random_structure(rng: random.Random) -> WorkflowStructure:
    def ident(prefix, i):
        return f"{prefix}{i}_{rng.choice('abcdef')}"

    steps = [StepDecl(ident("step", i)) for i in range(rng.randint(0, 6))]
    inputs = [
        PortDecl(ident("in", i), data_type=rng.choice(["File", "string", "int"]),
                 edam_format=rng.choice([None, "format_1929", "format_3016"]))
        for i in range(rng.randint(0, 5))
    ]
    outputs = [
        PortDecl(
            ident("out", i),
            data_type="File",
            source_step=rng.choice([s.id for s in steps]) if steps and rng.random() < 0.5 else None,
        )
        for i in range(rng.randint(0, 4))
    ]
    return WorkflowStructure(
        name=rng.choice([None, "Случайный", "Pipeline"]),
        inputs=inputs,
        outputs=outputs,
        steps=steps,
        edam_topics=rng.sample(["topic_0196", "topic_0622", "topic_3168"], rng.randint(0, 2)),
        edam_operations=rng.sample(["operation_0525", "operation_3227"], rng.randint(0, 2)),
    )


def test_generate_round_trip_100_random_structures():
    rng = random.Random(20250601)
    for _ in range(100):
        structure = random_structure(rng)
        parsed = parse_cwl_abstract(generate_abstract_cwl(structure))
        assert [p.id for p in parsed.inputs] == [p.id for p in structure.inputs]
        assert [p.id for p in parsed.outputs] == [p.id for p in structure.outputs]
        assert [s.id for s in parsed.steps] == [s.id for s in structure.steps]
        assert parsed.edam_topics == structure.edam_topics
        assert parsed.edam_operations == structure.edam_operations


# ---------------------------------------------------------------------------
# Fuzz: parsers never crash on arbitrary bytes
# ---------------------------------------------------------------------------

PARSE_ERRORS = (ParseError, SchemaError, NotAWorkflow, NotFoundError)


@settings(max_examples=150, deadline=None)
@given(st.binary(max_size=2048))
def test_parse_galaxy_total(data):
    try:
        result = parse_galaxy(data)
    except PARSE_ERRORS:
        return
    assert isinstance(result, WorkflowStructure)


@settings(max_examples=150, deadline=None)
@given(st.binary(max_size=2048))
def test_parse_cwl_total(data):
    try:
        result = parse_cwl_abstract(data)
    except PARSE_ERRORS:
        return
    assert isinstance(result, WorkflowStructure)


@settings(max_examples=100, deadline=None)
@given(st.binary(max_size=2048))
def test_parse_snakemake_and_nextflow_total(data):
    for parser, name in ((parse_snakemake, "Snakefile"), (parse_nextflow_manifest, "nextflow.config")):
        try:
            result = parser({name: data})
        except PARSE_ERRORS:
            continue
        assert isinstance(result, WorkflowStructure)


@settings(max_examples=100, deadline=None)
@given(st.binary(max_size=4096), st.text(min_size=1, max_size=20))
def test_detect_class_total(content, name):
    assert isinstance(detect_class(name, content), str)
