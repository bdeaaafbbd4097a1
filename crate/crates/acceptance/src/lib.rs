//! Holds the `acceptance` test target; run it with
//! `cargo test -p fdtwr-acceptance --test acceptance`.
