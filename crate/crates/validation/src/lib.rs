//! Holds the `acceptance` test target; run it with
//! `cargo test -p switchrun-validation --test acceptance`.
