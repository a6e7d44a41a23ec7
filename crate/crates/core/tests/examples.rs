#[path = "../examples/gp_regression.rs"]
mod gp_regression;

#[path = "../examples/ep_classifier.rs"]
mod ep_classifier;

#[path = "../examples/oracle_pf.rs"]
mod oracle_pf;

#[path = "../examples/custom_system.rs"]
mod custom_system;

#[test]
fn gp_regression_example_runs() {
    gp_regression::run_example().expect("regression example should run");
}

#[test]
fn ep_classifier_example_runs() {
    ep_classifier::run_example().expect("classifier example should run");
}

#[test]
fn oracle_example_runs() {
    oracle_pf::run_example().expect("oracle example should run");
}

#[test]
fn custom_system_example_runs() {
    custom_system::run_example().expect("custom system example should run");
}
