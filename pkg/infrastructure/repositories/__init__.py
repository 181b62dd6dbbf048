# Repository implementations package 