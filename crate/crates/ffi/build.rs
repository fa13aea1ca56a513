use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = crate_dir.join("include").join("chainlp.h");
    let mut config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("CHAINLP_H".into()),
        cpp_compat: true,
        documentation: true,
        ..Default::default()
    };
    // CHAINLP_STATUS_OK instead of a bare Ok in the C namespace
    config.enumeration.prefix_with_name = true;
    config.enumeration.rename_variants = cbindgen::RenameRule::ScreamingSnakeCase;
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("cbindgen generates the C header")
        .write_to_file(header);
    println!("cargo:rerun-if-changed=src/lib.rs");
}
