//! Core semantics for labelled partial orders (LPOs) and glued LPOs.
//!
//! An LPO represents a single concurrent computation: nodes are
//! self-identifying histories of individual agents or tokens, edges are
//! events, and two relations generate the order — a communication relation
//! (participation in events) and an interleaving relation (scheduling
//! constraints forced by reconfiguration or shared resources).
//!
//! A glued LPO drops the reconfiguration-forced part of the interleaving
//! relation and instead attaches glue relations to event labels. One glued
//! LPO stands for the whole family of LPOs that differ only in how the
//! forced interleaving was scheduled.
//!
//! The crate is `no_std` (with `alloc`); IO, parsing and serialization live
//! in the companion `gluepo` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod async_automata;
pub mod cts;
pub mod po;
pub mod pti;
