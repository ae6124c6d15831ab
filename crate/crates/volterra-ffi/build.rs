//! Regenerates the committed C header from the extern "C" surface whenever
//! the source changes. Writing is skipped when the content is identical so
//! incremental builds stay quiet.

use std::env;
use std::fs;
use std::path::Path;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let crate_dir = env::var("CARGO_MANIFEST_DIR").expect("cargo sets CARGO_MANIFEST_DIR");
    let bindings = cbindgen::generate(&crate_dir)
        .expect("the C header must be generatable from src/lib.rs");

    let mut rendered = Vec::new();
    bindings.write(&mut rendered);

    let header_path = Path::new(&crate_dir).join("include").join("volterra.h");
    let current = fs::read(&header_path).unwrap_or_default();
    if current != rendered {
        fs::create_dir_all(header_path.parent().expect("include dir has a parent"))
            .expect("include directory must be creatable");
        fs::write(&header_path, &rendered).expect("header must be writable");
    }
}
