"""Shared fixtures: the standard datatype/function environment used across
the suite, built by parsing a prelude problem file."""

from __future__ import annotations

import pytest

from folbridge.parser import parse_problem

PRELUDE = """\
data option (A) = none | some (A).
data list (A) = nil | cons (A) (list A).
data nat = O | S (nat).
def hd_error : forall (A : Type), list A -> option A =
  fun (A : Type) (l : list A) =>
    match l return option A with | nil => none A | cons x _ => some A x end.
def length : forall (A : Type), list A -> Int =
  fun (A : Type) =>
    fix length/0 (l : list A) : Int :=
      match l return Int with | nil => 0 | cons _ l' => 1 + length l' end.
def nlength : forall (A : Type), list A -> nat =
  fun (A : Type) =>
    fix nlength/0 (l : list A) : nat :=
      match l return nat with | nil => O | cons _ l' => S (nlength l') end.
def app : forall (A : Type), list A -> list A -> list A =
  fun (A : Type) =>
    fix app/0 (l1 : list A) (l2 : list A) : list A :=
      match l1 return list A with | nil => l2 | cons x l0 => cons A x (app l0 l2) end.
def search : forall (A : Type), A -> list A -> Bool =
  fun (A : Type) =>
    fix search/1 (x : A) (l : list A) : Bool :=
      match l return Bool with | nil => false | cons x0 l0 => eqb A x x0 || search x l0 end.
def two : Int = 2.
def bnot : Bool -> Bool =
  fun (b : Bool) => match b return Bool with | true => false | false => true end.
goal true = true.
"""


@pytest.fixture(scope="session")
def prelude():
    return parse_problem(PRELUDE)


@pytest.fixture(scope="session")
def env(prelude):
    return prelude.env
