//! Compiles the guide's code samples as doc-tests.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

chapter!(introduction, "introduction.md");
chapter!(abc, "abc.md");
chapter!(parallel_tempering, "parallel-tempering.md");
chapter!(rings, "rings.md");
chapter!(toy_model, "toy-model.md");
chapter!(tuberculosis, "tuberculosis.md");
chapter!(diagnostics, "diagnostics.md");
chapter!(reproducibility, "reproducibility.md");
chapter!(cli, "cli.md");

#[doc = include_str!("../../../README.md")]
pub mod readme {}
