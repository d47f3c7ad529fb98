package main

import (
	"net/http/httptest"
	"testing"
)

func TestHandleRoot(t *testing.T) {
	rec := httptest.NewRecorder()
	handleRoot(rec, httptest.NewRequest("GET", "/", nil))
	if rec.Code != 200 {
		t.Fatalf("got %d", rec.Code)
	}
}
