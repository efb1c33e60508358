# BDD test package
