//! Every example runs to completion with its own assertions.

mod abelian_groups {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/abelian_groups.rs"
    ));

    #[test]
    fn runs() {
        run_example().expect("example runs");
    }
}

mod ringoids_and_functors {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/ringoids_and_functors.rs"
    ));

    #[test]
    fn runs() {
        run_example().expect("example runs");
    }
}

mod modules_and_yoneda {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/modules_and_yoneda.rs"
    ));

    #[test]
    fn runs() {
        run_example().expect("example runs");
    }
}

mod tensor_flatness_purity {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/tensor_flatness_purity.rs"
    ));

    #[test]
    fn runs() {
        run_example().expect("example runs");
    }
}

mod base_change {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/base_change.rs"
    ));

    #[test]
    fn runs() {
        run_example().expect("example runs");
    }
}

mod diagram_modules {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/diagram_modules.rs"
    ));

    #[test]
    fn runs() {
        run_example().expect("example runs");
    }
}

mod representation_theorem {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/representation_theorem.rs"
    ));

    #[test]
    fn runs() {
        run_example().expect("example runs");
    }
}

mod matrix_ring {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/matrix_ring.rs"
    ));

    #[test]
    fn runs() {
        run_example().expect("example runs");
    }
}

mod cli_report {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/cli_report.rs"
    ));

    #[test]
    fn runs() {
        run_example().expect("example runs");
    }
}
