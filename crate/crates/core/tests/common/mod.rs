/// Proptest settings for integration tests: failing cases persist next to
/// the test source, since these targets have no `lib.rs` to anchor on.
pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: Some(Box::new(
            proptest::test_runner::FileFailurePersistence::WithSource("regressions"),
        )),
        ..Default::default()
    }
}
