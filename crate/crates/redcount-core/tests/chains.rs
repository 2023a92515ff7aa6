//! End-to-end tests of the `redcount` binary: sampling, reductions,
//! solving, verification, and provenance, all through the public CLI and
//! the on-disk formats.

use std::fs;
use std::process::{Command, Output};

use redcount_core::factored::{count_factored, sample_uniform_factored, Predicate};
use redcount_core::instances::{count_cliques, count_ov, count_sat, BigCount, CnfFormula, Graph};
use redcount_core::pipeline::{parse_plan, run_chain, ReductionStep};
use redcount_core::rng;
use redcount_core::serial::{
    cnf_to_dimacs, graph_to_edge_list, parse_json_line, to_json_line, Instance,
};

fn redcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_redcount"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn sample_is_deterministic_and_consistent_with_its_preimage() {
    let args = [
        "sample", "d-xor", "--N", "64", "--K", "4", "--b", "1", "--g", "2", "--seed", "7",
        "--with-preimage",
    ];
    let first = redcount(&args);
    assert!(first.status.success(), "sample failed: {first:?}");
    let second = redcount(&args);
    assert_eq!(first.stdout, second.stdout, "same seed must give identical bytes");

    let lines = stdout_lines(&first);
    assert_eq!(lines.len(), 2, "instance plus preimage");
    let ground = parse_json_line(&lines[0]).unwrap();
    let preimage = parse_json_line(&lines[1]).unwrap();
    let (Instance::Xor(ground), Instance::Factored(preimage)) = (ground, preimage) else {
        panic!("expected a ground XOR instance and a factored preimage");
    };
    assert_eq!(
        redcount_core::instances::count_xor(&ground).unwrap(),
        count_factored(&preimage).unwrap(),
        "grounding must preserve the count"
    );

    let other_seed = redcount(&[
        "sample", "d-xor", "--N", "64", "--K", "4", "--b", "1", "--g", "2", "--seed", "8",
    ]);
    assert_ne!(first.stdout[..first.stdout.len() / 2], other_seed.stdout[..]);
}

#[test]
fn chain_cli_preserves_counts_and_links_digests() {
    let dir = tempfile::tempdir().unwrap();
    let input_path = dir.path().join("input.jsonl");
    let plan_path = dir.path().join("plan.jsonl");
    let out_path = dir.path().join("out.jsonl");
    let prov_path = dir.path().join("prov.json");

    let mut rng = rng::from_seed(11);
    let inst = sample_uniform_factored(2, 4, 2, 1, Predicate::Ov, &mut rng).unwrap();
    let want = count_factored(&inst).unwrap();
    fs::write(&input_path, to_json_line(&Instance::Factored(inst)) + "\n").unwrap();

    fs::write(
        &plan_path,
        concat!(
            "# convert to the SUM world, then ground\n",
            "{\"step\":\"generic-to-sum\"}\n",
            "{\"step\":\"ground-sum\"}\n",
        ),
    )
    .unwrap();

    let out = redcount(&[
        "chain",
        plan_path.to_str().unwrap(),
        "--input",
        input_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--provenance",
        prov_path.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "chain failed: {out:?}");

    // The solved count of the chained output matches the input count.
    let solve = redcount(&["solve", "count", out_path.to_str().unwrap()]);
    assert!(solve.status.success(), "solve failed: {solve:?}");
    assert_eq!(stdout_lines(&solve)[0], want.to_decimal());

    // Provenance records every step with linked digests.
    let prov: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&prov_path).unwrap()).unwrap();
    let records = prov["steps"].as_array().unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0]["step"], "generic-to-sum");
    assert_eq!(records[1]["step"], "ground-sum");
    assert_eq!(records[0]["output"], records[1]["input"]);
    assert_eq!(prov["root_seed"], 3);

    // Re-running with the same seed reproduces the output bytes.
    let out_again_path = dir.path().join("out2.jsonl");
    let again = redcount(&[
        "chain",
        plan_path.to_str().unwrap(),
        "--input",
        input_path.to_str().unwrap(),
        "--out",
        out_again_path.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    assert!(again.status.success());
    assert_eq!(
        fs::read(&out_path).unwrap(),
        fs::read(&out_again_path).unwrap()
    );
}

#[test]
fn chain_library_route_agrees_with_plan_parsing() {
    let plan = "{\"step\":\"factor-ov\",\"b\":1,\"g\":2}\n{\"step\":\"generic-to-xor\"}\n{\"step\":\"ground-xor\"}\n";
    let steps = parse_plan(plan).unwrap();
    assert_eq!(
        steps,
        vec![
            ReductionStep::FactorOv { b: 1, g: 2 },
            ReductionStep::GenericToXor,
            ReductionStep::GroundXor,
        ]
    );
    let mut rng = rng::from_seed(21);
    let lists = (0..2)
        .map(|_| {
            (0..4)
                .map(|_| redcount_core::bits::random_bitvector(2, &mut rng))
                .collect()
        })
        .collect();
    let inst = redcount_core::instances::OvInstance::new(lists, 2).unwrap();
    let want = count_ov(&inst).unwrap();
    let (output, provenance) = run_chain(&steps, &Instance::Ov(inst), 5).unwrap();
    let Instance::Xor(ground) = output else {
        panic!("expected a ground XOR instance");
    };
    assert_eq!(redcount_core::instances::count_xor(&ground).unwrap(), want);
    assert_eq!(provenance.records.len(), 3);
}

#[test]
fn verify_cli_exit_codes_separate_honest_from_mutated() {
    let honest = redcount(&["verify", "ground-xor", "--trials", "25", "--seed", "2"]);
    assert!(honest.status.success(), "honest step must verify: {honest:?}");
    let summary = stdout_lines(&honest);
    assert!(summary.last().unwrap().contains("25 trials, 0 failures"));

    let mutated = redcount(&["verify", "mutated-ground-xor", "--trials", "200", "--seed", "2"]);
    assert_eq!(
        mutated.status.code(),
        Some(1),
        "mutated step must fail: {mutated:?}"
    );
    assert!(String::from_utf8_lossy(&mutated.stdout).contains("FAIL"));

    let missing = redcount(&["verify", "no-such-step", "--trials", "5"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn solve_reads_dimacs_and_edge_list_files() {
    let dir = tempfile::tempdir().unwrap();

    let f = CnfFormula::new(3, vec![vec![1, -2], vec![2, 3], vec![-1]]).unwrap();
    let want = count_sat(&f).unwrap();
    let cnf_path = dir.path().join("f.cnf");
    fs::write(&cnf_path, cnf_to_dimacs(&f)).unwrap();
    let out = redcount(&["solve", "count", cnf_path.to_str().unwrap()]);
    assert!(out.status.success(), "solve cnf failed: {out:?}");
    assert_eq!(stdout_lines(&out)[0], want.to_decimal());

    let g = Graph::complete(5);
    let graph_path = dir.path().join("g.edges");
    fs::write(&graph_path, graph_to_edge_list(&g)).unwrap();
    let out = redcount(&[
        "solve",
        "count",
        graph_path.to_str().unwrap(),
        "--clique-k",
        "3",
    ]);
    assert!(out.status.success(), "solve graph failed: {out:?}");
    assert_eq!(
        stdout_lines(&out)[0],
        count_cliques(&g, 3).unwrap().to_decimal()
    );

    // Graph without --clique-k is an argument error, not a crash.
    let out = redcount(&["solve", "count", graph_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reduce_cli_applies_a_step_to_every_instance() {
    let dir = tempfile::tempdir().unwrap();
    let input_path = dir.path().join("in.jsonl");
    let mut rng = rng::from_seed(31);
    let mut lines = String::new();
    let mut wants = Vec::new();
    for _ in 0..3 {
        let inst = sample_uniform_factored(2, 2, 1, 2, Predicate::Xor, &mut rng).unwrap();
        wants.push(count_factored(&inst).unwrap());
        lines.push_str(&to_json_line(&Instance::Factored(inst)));
        lines.push('\n');
    }
    fs::write(&input_path, lines).unwrap();

    let out = redcount(&[
        "reduce",
        "generic-to-ov",
        "--input",
        input_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "reduce failed: {out:?}");
    let outputs = stdout_lines(&out);
    assert_eq!(outputs.len(), 3);
    for (line, want) in outputs.iter().zip(&wants) {
        let Instance::Factored(conv) = parse_json_line(line).unwrap() else {
            panic!("expected factored output");
        };
        assert_eq!(conv.predicate, Predicate::Ov);
        assert_eq!(&count_factored(&conv).unwrap(), want);
    }
}

#[test]
fn preset_sampling_matches_explicit_parameters() {
    let via_preset = redcount(&["sample", "--preset", "table3-xor-from-eth", "--seed", "9"]);
    assert!(via_preset.status.success(), "preset failed: {via_preset:?}");
    let explicit = redcount(&[
        "sample", "d-xor", "--N", "64", "--K", "8", "--b", "2", "--g", "4", "--seed", "9",
    ]);
    assert!(explicit.status.success());
    assert_eq!(via_preset.stdout, explicit.stdout);

    let listing = redcount(&["presets"]);
    assert!(listing.status.success());
    let text = String::from_utf8_lossy(&listing.stdout).to_string();
    for name in [
        "table2-ov-from-eth",
        "table3-xor-from-sum",
        "table4-sum-from-xor",
    ] {
        assert!(text.contains(name), "presets listing misses {name}");
    }
}

#[test]
fn big_counts_round_trip_through_text() {
    // A count too large for u64: 2^80 from an unconstrained formula.
    let f = CnfFormula::new(20, vec![]).unwrap();
    let c = count_sat(&f).unwrap();
    let mut big = BigCount::one();
    for _ in 0..20 {
        big = big.clone() + big;
    }
    assert_eq!(c, big);
    assert_eq!(c.to_decimal(), "1048576");
}
