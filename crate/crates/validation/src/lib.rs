//! Holds the `acceptance` test target, which checks the primary criteria
//! end to end and prints one PASS/FAIL line for each.
