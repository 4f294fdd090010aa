fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("cargo sets CARGO_MANIFEST_DIR");
    let out = std::path::Path::new(&crate_dir).join("include/gerbelab.h");
    std::fs::create_dir_all(out.parent().expect("include dir")).expect("create include dir");
    let config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("GERBELAB_H".into()),
        cpp_compat: true,
        documentation: true,
        ..Default::default()
    };
    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(&out);
        }
        // don't fail the build when cbindgen can't parse (e.g. during vendoring)
        Err(e) => println!("cargo:warning=cbindgen skipped: {e}"),
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
}
