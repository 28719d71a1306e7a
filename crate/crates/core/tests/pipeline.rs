use balmod::channel::{random_word, sample_levels_with, DriftModel};
use balmod::harness::{emit, run, ExperimentKind, ExperimentSpec, OutputFormat, Params, ResultTable};
use balmod::ldpc::{balanced_decode_symmetric, bsc_llr, SymmetricDecoder};
use balmod::rng::stream;
use balmod::thresholding::{balancing_threshold_exact, read_with_threshold};
use balmod::{balanced_encode, build_gallager, KnuthCodec};

#[test]
fn knuth_block_survives_mean_drift() {
    let codec = KnuthCodec::new(256).unwrap();
    let model = DriftModel::mean_drift(0.05).unwrap();
    let mut rng = stream(10, &[]);
    for _ in 0..50 {
        let u = random_word(256, &mut rng);
        let stored = codec.encode(&u).unwrap().to_word();
        let block = sample_levels_with(&stored, &model, 0.4, &mut rng).unwrap();
        let v = balancing_threshold_exact(&block.levels).unwrap().threshold;
        // a fixed threshold at 0.5 would misread many of the drifted ones
        assert!(v < 0.45, "{v}");
        let read = read_with_threshold(&block.levels, v);
        assert_eq!(codec.decode_word(&read).unwrap(), u);
    }
}

#[test]
fn balanced_ldpc_corrects_a_few_flips() {
    let code = build_gallager(280, 4, 7, 11).unwrap();
    let mut rng = stream(11, &[]);
    for trial in 0..20 {
        let u = random_word(code.k(), &mut rng);
        let (x, _) = balanced_encode(&code, &u).unwrap();
        let mut y = x.as_word().clone();
        for p in [trial, 100 + trial, 200 + 2 * trial] {
            y.flip(p);
        }
        let d = balanced_decode_symmetric(&code, &bsc_llr(&y, 0.02).unwrap(), &SymmetricDecoder::default()).unwrap();
        assert_eq!(d.u, u);
    }
}

#[test]
fn emitted_tables_reload_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::defaults(ExperimentKind::ThresholdCompare, 5);
    spec.trials = 3;
    if let Params::ThresholdCompare(p) = &mut spec.params {
        p.cells = 256;
    }
    let table = run(&spec).unwrap();
    let path = dir.path().join("t.csv");
    emit(&table, OutputFormat::Csv, &path).unwrap();
    let back = ResultTable::load_csv(&path).unwrap();
    assert_eq!(back, table);
    assert_eq!(back.spec_value("experiment"), Some("threshold-compare"));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), run(&spec).unwrap().to_csv().unwrap());

    let svg = dir.path().join("t.svg");
    emit(&table, OutputFormat::Svg, &svg).unwrap();
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    assert!(emit(&table, OutputFormat::Csv, &dir.path().join("missing/t.csv")).is_err());
}

#[test]
fn seeds_change_results() {
    let mut a = ExperimentSpec::defaults(ExperimentKind::BerCurve, 1);
    a.trials = 2;
    if let Params::Ber(p) = &mut a.params {
        p.cells = 1000;
        p.times = vec![0.3];
    }
    let mut b = a.clone();
    b.seed = 2;
    let (ta, tb) = (run(&a).unwrap(), run(&b).unwrap());
    assert_ne!(ta.rows, tb.rows);
}
