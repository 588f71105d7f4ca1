//! Holds the `acceptance` integration test; run it with
//! `cargo test -p sossa-validation --test acceptance`.
