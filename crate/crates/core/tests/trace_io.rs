use abcpt::toy::ToyModel;
use abcpt::{run_abc_pt, PtConfig, Trace};

#[test]
fn binary_trace_roundtrip_of_a_run() {
    let config = PtConfig::toy_preset(61).with_iterations(2_000, 100).unwrap().with_rings(Some(3)).unwrap();
    let out = run_abc_pt(&config, &ToyModel::new()).unwrap();
    let bytes = out.trace.to_bytes();
    let back = Trace::read_binary(&bytes[..]).unwrap();
    assert_eq!(back, out.trace);
    assert!(Trace::read_binary(&bytes[..bytes.len() - 1]).is_err());
    let mut longer = bytes.clone();
    longer.push(0);
    assert!(Trace::read_binary(&longer[..]).is_err());
}

#[test]
fn csv_trace_layout() {
    let config = PtConfig::toy_preset(62).with_iterations(50, 0).unwrap();
    let out = run_abc_pt(&config, &ToyModel::new()).unwrap();
    let mut buf = Vec::new();
    out.trace.write_states_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("iteration,chain,theta,accepted"));
    assert_eq!(lines.count(), 50 * 15);
    let mut buf = Vec::new();
    out.trace.write_exchanges_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), out.trace.exchanges().len() + 1);
}
