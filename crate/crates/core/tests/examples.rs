use biham_core::fixtures::Example;
use biham_core::{Report, Status};
use symkern::ZeroTestConfig;

fn failures(r: &Report) -> Vec<String> {
    r.checks
        .iter()
        .filter(|c| c.status != Status::Pass && c.status != Status::Skipped)
        .map(|c| format!("{} [{}]: {}", c.name, c.status, c.detail))
        .collect()
}

#[test]
fn toda_example_passes() {
    let (_, report) = Example::toda().unwrap().run(&ZeroTestConfig::default()).unwrap();
    assert_eq!(failures(&report), Vec::<String>::new());
    for name in ["biham-consistency", "flat-pencil", "theorem1", "theorem2", "theorem3", "closed-form"] {
        assert_eq!(report.get(name).unwrap().status, Status::Pass, "{name}");
    }
}

#[test]
fn kdv_examples_pass() {
    for (m, k) in [(1, 1), (2, 3)] {
        let (_, report) = Example::kdv(m, k).unwrap().run(&ZeroTestConfig::default()).unwrap();
        assert_eq!(failures(&report), Vec::<String>::new(), "m = {m}, k = {k}");
        assert!(report.checks.iter().all(|c| c.status == Status::Pass), "m = {m}, k = {k}");
    }
}

#[test]
fn kdv_rejects_m_zero() {
    assert!(Example::kdv(0, 1).is_err());
}
